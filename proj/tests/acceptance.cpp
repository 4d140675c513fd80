// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "kgod/bench.hpp"
#include "kgod/query.hpp"
#include "kgod/service.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/naive_sparql.hpp"
#include "support/random_corpus.hpp"
#include "support/stub_api.hpp"

using namespace kgod;
using Clock = std::chrono::steady_clock;

namespace {

const NamespaceConfig kNs;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Iri dbr(const std::string& local) { return Iri(kNs.resource_base.str() + local); }
Iri dbo(const std::string& local) { return Iri(kNs.ontology_base.str() + local); }

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

ServiceConfig fixture_config() {
  return parse_service_config(prop::read_fixture("service.conf"), prop::fixture_path(""));
}

ServiceConfig stub_config(const prop::StubApi& stub, double ttl) {
  ServiceConfig cfg = fixture_config();
  LiveMode live;
  live.api_endpoint = stub.endpoint();
  live.rate_limit = 1000;
  cfg.engine.source.mode = live;
  cfg.engine.cache_ttl = ttl;
  return cfg;
}

MappingSet fixture_mappings() { return load_mappings(prop::read_fixture("mappings.txt"), kNs); }

std::set<std::string> column(const BindingSet& b) {
  std::set<std::string> out;
  for (const auto& row : b.rows) out.insert(to_ntriples(row.at(0)));
  return out;
}

Outcome paper_queries() {
  EngineConfig cfg = fixture_config().engine;
  std::ostringstream detail;
  bool ok = true;
  struct Case {
    const char* query;
    std::set<std::string> want;
  };
  const std::vector<Case> cases{
      {"SELECT ?actor WHERE { ?actor dbo:starring dbr:Lost_Highway }",
       {to_ntriples(dbr("Bill_Pullman")), to_ntriples(dbr("Patricia_Arquette"))}},
      {"SELECT ?director WHERE { dbr:Lost_Highway dbo:director ?director }", {to_ntriples(dbr("David_Lynch"))}}};
  for (const Case& c : cases) {
    // Cold engine per query: the time includes extraction.
    Engine engine(cfg, make_source(cfg.source), fixture_mappings());
    const auto start = Clock::now();
    const BindingSet b = evaluate(parse_query(c.query), [&](const Iri& iri) { return engine.extract(iri).graph; });
    const double s = seconds_since(start);
    const bool equal = column(b) == c.want && b.rows.size() == c.want.size();
    ok = ok && equal && s < 1.0;
    detail << (equal ? "match" : "MISMATCH") << " in " << s * 1000 << " ms; ";
  }
  return {ok, detail.str()};
}

Outcome paper_rejections() {
  Service svc(fixture_config());
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  server.start_background();
  httplib::Client client("127.0.0.1", port);
  struct Case {
    const char* query;
    std::size_t index;
  };
  const std::vector<Case> cases{{"SELECT ?actor ?movie WHERE { ?actor dbo:starring ?movie .}", 0},
                                {"SELECT ?director WHERE { dbr:Tom_Cruise dbo:starring ?movie .\n"
                                 "                         ?movie dbo:director ?director .}",
                                 1}};
  bool ok = true;
  std::ostringstream detail;
  for (const Case& c : cases) {
    const auto cls = classify(parse_query(c.query));
    const auto* u = std::get_if<Unsupported>(&cls);
    const bool classified =
        u && u->reason == UnsupportedReason::NoFixedResource && u->pattern_index == c.index;
    auto res = client.Post("/sparql", httplib::Params{{"query", c.query}});
    const bool http = res && res->status == 400 &&
                      nlohmann::json::parse(res->body)["reason"] == "NoFixedResource" &&
                      nlohmann::json::parse(res->body)["pattern_index"] == c.index;
    ok = ok && classified && http;
    detail << "NoFixedResource(" << c.index << ") " << (classified ? "ok" : "WRONG") << ", HTTP "
           << (res ? res->status : -1) << "; ";
  }
  server.stop();
  return {ok, detail.str()};
}

Outcome oracle_equivalence() {
  EngineConfig cfg = fixture_config().engine;
  Engine engine(cfg, make_source(cfg.source), fixture_mappings());
  const std::vector<std::string> titles{"Lost Highway", "David Lynch", "Bill Pullman", "Patricia Arquette"};
  FixtureSource source(prop::fixture_path("corpus"));
  const Graph global = prop::materialize_pages(source, titles, fixture_mappings(), kNs);

  prop::QueryVocabulary v;
  for (const auto& t : titles) v.resources.push_back(title_to_iri(t, kNs));
  v.predicates = {dbo("director"), dbo("starring"), dbo("runtime"), dbo("occupation"), dbo("abstract"),
                  kNs.type_predicate, kNs.label_predicate};
  prop::Gen gen(20240601);
  const auto queries = prop::enumerate_queries(v, gen, 600);
  std::size_t equal = 0, nonempty = 0;
  std::string first_failure;
  for (const std::string& q : queries) {
    const QueryAst ast = parse_query(q);
    const BindingSet got = evaluate(ast, [&](const Iri& iri) { return engine.extract(iri).graph; });
    if (got == prop::naive_evaluate(ast, global)) {
      ++equal;
    } else if (first_failure.empty()) {
      first_failure = q;
    }
    nonempty += !got.rows.empty();
  }
  std::ostringstream detail;
  detail << equal << "/" << queries.size() << " queries equal (" << nonempty << " non-empty)";
  if (!first_failure.empty()) detail << "; first failure: " << first_failure;
  return {equal == queries.size() && queries.size() >= 300, detail.str()};
}

Outcome partition() {
  prop::Gen gen(7);
  const MappingSet ms = load_mappings(prop::kCorpusMappings, kNs);
  const auto dir = std::filesystem::temp_directory_path() / "kgod_acceptance_partition";
  std::size_t corpora = 0, graphs = 0, violations = 0, ingoing = 0;
  for (; corpora < 100; ++corpora) {
    const prop::RandomCorpus corpus = prop::make_random_corpus(gen, dir, 20 + gen.below(11));
    const Graph global = prop::materialize(corpus, ms, kNs);
    FixtureSource source(corpus.dir);
    Graph reassembled;
    for (const std::string& title : corpus.titles) {
      const Iri s = title_to_iri(title, kNs);
      const ResourceGraph rg = extract_resource(s, {}, {source, ms, kNs});
      ++graphs;
      Graph want_out, want_in;
      for (const Triple& t : global) {
        if (t.subject == s) want_out.insert(t);
        if (t.object == Term(s) && t.subject != s) want_in.insert(t);
      }
      for (const Triple& t : rg.outgoing) violations += t.subject != s;
      for (const Triple& t : rg.ingoing) violations += t.object != Term(s) || t.subject == s;
      violations += rg.outgoing != want_out;
      violations += rg.ingoing != want_in;
      reassembled.merge(rg.outgoing);
      ingoing += rg.ingoing.size();
    }
    // The outgoing graphs together are the whole corpus graph.
    violations += reassembled != global;
  }
  std::filesystem::remove_all(dir);
  std::ostringstream detail;
  detail << corpora << " corpora, " << graphs << " resources, " << ingoing << " ingoing triples, " << violations
         << " violations";
  return {violations == 0 && corpora >= 100 && ingoing > 0, detail.str()};
}

Outcome linear_scaling() {
  const auto start = Clock::now();
  const auto dir = std::filesystem::temp_directory_path() / "kgod_acceptance_bench";
  std::filesystem::remove_all(dir);
  const std::vector<std::size_t> counts{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  generate_synthetic_corpus(counts, dir, 1);
  const BenchReport r = run_bench(dir, counts, {.repeats = 10});
  std::filesystem::remove_all(dir);
  const double elapsed = seconds_since(start);
  bool exact_pages = r.samples.size() == counts.size();
  for (const BenchSample& s : r.samples) exact_pages = exact_pages && s.pages_processed == 1 + s.backlink_count;
  const bool pages_r2 = r.pages_fit && r.pages_fit->r_squared && *r.pages_fit->r_squared == 1.0;
  const bool time_r2 = r.r_squared && *r.r_squared >= 0.9;
  std::ostringstream detail;
  detail << "pages r2=" << (r.pages_fit && r.pages_fit->r_squared ? *r.pages_fit->r_squared : -1)
         << ", time r2=" << r.r_squared.value_or(-1) << ", slope=" << r.slope.value_or(0) << " ms/link, "
         << elapsed << " s";
  return {exact_pages && pages_r2 && time_r2 && elapsed < 120, detail.str()};
}

Outcome backlink_cap() {
  const auto dir = std::filesystem::temp_directory_path() / "kgod_acceptance_cap";
  std::filesystem::remove_all(dir);
  const std::vector<std::size_t> ks{0, 1, 3, 10, 25};
  const std::vector<std::size_t> ms{0, 1, 2, 5, 10, 50};
  generate_synthetic_corpus(ks, dir, 3);
  std::ifstream in(dir / "mappings.txt");
  std::ostringstream mapping_text;
  mapping_text << in.rdbuf();
  EngineConfig cfg;
  cfg.source.mode = FixtureMode{dir};
  Engine engine(cfg, make_source(cfg.source), load_mappings(mapping_text.str(), cfg.ns));
  std::size_t pairs = 0, good = 0;
  std::string first_failure;
  for (std::size_t k : ks) {
    for (std::size_t m : ms) {
      ExtractionOptions opts;
      opts.max_backlinks = m;
      const auto g = engine.extract(title_to_iri(bench_target_title(k), cfg.ns), opts).graph;
      ++pairs;
      if (g->provenance.pages_processed == 1 + std::min(m, k)) {
        ++good;
      } else if (first_failure.empty()) {
        first_failure = "m=" + std::to_string(m) + " k=" + std::to_string(k) + " got " +
                        std::to_string(g->provenance.pages_processed);
      }
    }
  }
  std::filesystem::remove_all(dir);
  return {good == pairs, std::to_string(good) + "/" + std::to_string(pairs) + " (m, k) pairs" +
                             (first_failure.empty() ? "" : "; " + first_failure)};
}

Outcome cache_behavior() {
  std::ostringstream detail;
  bool ok = true;
  {
    prop::StubApi stub;
    stub.load_corpus(prop::fixture_path("corpus"));
    Service svc(stub_config(stub, 300));
    HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    server.start_background();
    httplib::Client client("127.0.0.1", port);
    const httplib::Headers accept{{"Accept", "application/n-triples"}};
    auto first = client.Get("/resource/Lost_Highway", accept);
    const std::size_t after_first = stub.request_count();
    auto second = client.Get("/resource/Lost_Highway", accept);
    const std::size_t fetched = stub.request_count() - after_first;
    const bool hit = first && second && first->get_header_value("X-Cache") == "MISS" &&
                     second->get_header_value("X-Cache") == "HIT" && fetched == 0 && first->body == second->body;
    ok = ok && hit && after_first > 0;
    detail << "ttl=300: MISS then " << (second ? second->get_header_value("X-Cache") : "?") << " with " << fetched
           << " upstream requests; ";
    server.stop();
  }
  {
    prop::StubApi stub;
    stub.load_corpus(prop::fixture_path("corpus"));
    Service svc(stub_config(stub, 0));
    HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    server.start_background();
    httplib::Client client("127.0.0.1", port);
    std::size_t refetched = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t before = stub.request_count();
      auto res = client.Get("/resource/Lost_Highway", httplib::Headers{{"Accept", "application/n-triples"}});
      refetched += res && res->get_header_value("X-Cache") == "MISS" && stub.request_count() > before;
    }
    ok = ok && refetched == 3;
    detail << "ttl=0: " << refetched << "/3 requests fetched upstream";
    server.stop();
  }
  return {ok, detail.str()};
}

Outcome serialization_round_trip() {
  prop::Gen gen(99);
  std::size_t identical = 0;
  for (int i = 0; i < 1000; ++i) {
    const Graph g = gen.graph(kNs, 12);
    identical += parse_ntriples(serialize_ntriples(g)) == g;
  }
  Service svc(fixture_config());
  std::size_t coherent = 0;
  const std::vector<std::string> names{"Lost_Highway", "David_Lynch", "Bill_Pullman", "Patricia_Arquette"};
  for (const std::string& name : names) {
    Request nt;
    nt.path = "/resource/" + name;
    nt.headers["accept"] = "application/n-triples";
    Request ttl = nt;
    ttl.headers["accept"] = "text/turtle";
    const Response a = svc.handle(nt), b = svc.handle(ttl);
    coherent += a.status == 200 && b.status == 200 && parse_ntriples(a.body) == parse_turtle(b.body) &&
                !parse_ntriples(a.body).empty();
  }
  return {identical == 1000 && coherent == names.size(),
          std::to_string(identical) + "/1000 fuzzed graphs identical; " + std::to_string(coherent) + "/" +
              std::to_string(names.size()) + " fixture resources NT == Turtle"};
}

// Started first and checked last, so the idle window overlaps the other criteria.
struct IdleWatch {
  prop::StubApi stub;
  std::unique_ptr<Service> svc;
  std::unique_ptr<HttpServer> server;
  Clock::time_point started;

  IdleWatch() {
    stub.load_corpus(prop::fixture_path("corpus"));
    svc = std::make_unique<Service>(stub_config(stub, 300));
    server = std::make_unique<HttpServer>(*svc);
    server->bind("127.0.0.1", 0);
    server->start_background();
    started = Clock::now();
  }

  Outcome finish(double idle_seconds) {
    const double remaining = idle_seconds - seconds_since(started);
    if (remaining > 0) std::this_thread::sleep_for(std::chrono::duration<double>(remaining));
    const double idle = seconds_since(started);
    const std::size_t requests = stub.request_count();
    server->stop();
    std::ostringstream detail;
    detail << requests << " upstream requests in " << idle << " s idle";
    return {requests == 0 && idle >= idle_seconds, detail.str()};
  }
};

}  // namespace

int main() {
  IdleWatch idle;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"paper query reproduction", paper_queries},
      {"paper rejection reproduction", paper_rejections},
      {"oracle equivalence", oracle_equivalence},
      {"ingoing/outgoing partition", partition},
      {"linear scaling", linear_scaling},
      {"backlink cap", backlink_cap},
      {"cache behavior", cache_behavior},
      {"serialization round-trip", serialization_round_trip},
  };
  int failures = 0;
  auto report = [&](const std::string& name, const Outcome& o) {
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failures += !o.pass;
  };
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(name, o);
  }
  report("idle economy", idle.finish(60));
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
