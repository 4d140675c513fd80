// Command line front end: serve, extract, query, bench.

#include <CLI11.hpp>

#include <unistd.h>

#include <csignal>
#include <fstream>
#include <iostream>

#include "kgod/bench.hpp"
#include "kgod/service.hpp"

using namespace kgod;

namespace {

enum Exit { kOk = 0, kUserError = 1, kUpstreamError = 2 };

int exit_for_status(int status) {
  if (status < 300) return kOk;
  if (status >= 500) return kUpstreamError;
  return kUserError;
}

int emit(const Response& r) {
  (r.status < 300 ? std::cout : std::cerr) << r.body;
  if (!r.body.empty() && r.body.back() != '\n') (r.status < 300 ? std::cout : std::cerr) << '\n';
  return exit_for_status(r.status);
}

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const unsigned long v = std::stoul(item, &used);
    if (used != item.size()) throw std::invalid_argument(item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-demand knowledge graph extraction from wiki pages"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "Configuration file (key = value); KGOD_* variables override it");

  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config_path, "Configuration file");

  CLI::App* extract = app.add_subcommand("extract", "Print the graph of one resource");
  std::string target;
  std::string format = "nt";
  bool no_ingoing = false;
  extract->add_option("resource", target, "Resource IRI or page title")->required();
  extract->add_option("-f,--format", format, "Output format")->check(CLI::IsMember({"nt", "ttl", "json"}));
  extract->add_flag("--no-ingoing", no_ingoing, "Leave out triples from backlinking pages");
  extract->add_option("--config", config_path, "Configuration file");

  CLI::App* query = app.add_subcommand("query", "Run a SPARQL query and print JSON results");
  std::string sparql;
  query->add_option("sparql", sparql, "Query text")->required();
  query->add_option("--config", config_path, "Configuration file");

  CLI::App* bench = app.add_subcommand("bench", "Time extraction against the number of backlinks");
  std::string counts_text = "10,20,30,40,50,60,70,80,90,100";
  std::size_t repeats = 10;
  std::string out_path;
  std::uint64_t seed = 1;
  std::string corpus_dir;
  std::optional<std::size_t> max_backlinks;
  bench->add_option("--counts", counts_text, "Comma separated backlink counts")->capture_default_str();
  bench->add_option("--repeats", repeats, "Timed runs per count")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--out", out_path, "CSV report path")->required();
  bench->add_option("--seed", seed, "Corpus generator seed")->capture_default_str();
  bench->add_option("--corpus", corpus_dir, "Directory for the synthetic corpus (default: temporary)");
  bench->add_option("--max-backlinks", max_backlinks, "Backlink cap during the runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    const auto parsed = app.get_subcommands();
    std::cerr << e.what() << "\n\n" << (parsed.empty() ? app.help() : parsed.front()->help());
    return kUserError;
  }

  try {
    if (*bench) {
      std::vector<std::size_t> counts;
      try {
        counts = parse_counts(counts_text);
      } catch (const std::exception&) {
        std::cerr << "--counts: expected comma separated non-negative integers\n";
        return kUserError;
      }
      const bool temporary = corpus_dir.empty();
      const std::filesystem::path dir =
          temporary ? std::filesystem::temp_directory_path() / ("kgod_bench_" + std::to_string(::getpid()))
                    : std::filesystem::path(corpus_dir);
      generate_synthetic_corpus(counts, dir, seed);
      BenchReport report;
      try {
        report = run_bench(dir, counts, {.repeats = repeats, .max_backlinks = max_backlinks});
      } catch (...) {
        if (temporary) std::filesystem::remove_all(dir);
        throw;
      }
      if (temporary) std::filesystem::remove_all(dir);
      const std::string csv = report_csv(report);
      std::ofstream out(out_path, std::ios::binary);
      if (!out || !(out << csv)) {
        std::cerr << "cannot write " << out_path << '\n';
        return kUserError;
      }
      std::cout << csv;
      if (report.pages_fit && report.pages_fit->r_squared) {
        std::cout << "# pages_processed r2=" << *report.pages_fit->r_squared << '\n';
      }
      return kOk;
    }

    ServiceConfig cfg = load_service_config(config_path);

    if (*serve) {
      Service svc(cfg);
      HttpServer server(svc);
      const int port = server.bind(cfg.host, cfg.port);
      std::cout << "listening on http://" << cfg.host << ":" << port << std::endl;
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.serve();
      g_server = nullptr;
      return kOk;
    }

    Service svc(cfg);
    if (*extract) {
      std::string name = target;
      const std::string& base = cfg.engine.ns.resource_base.str();
      if (target.find("://") != std::string::npos) {
        if (!target.starts_with(base)) {
          std::cerr << "IRI outside the resource namespace " << base << '\n';
          return kUserError;
        }
        name = target.substr(base.size());
      }
      Request req;
      req.path = "/resource/" + name;
      req.headers["accept"] = format == "json" ? "application/json" : format == "ttl" ? "text/turtle" : "application/n-triples";
      if (no_ingoing) req.params.emplace("include_ingoing", "false");
      return emit(svc.resource(name, req));
    }
    if (*query) {
      Request req;
      req.path = "/sparql";
      req.params.emplace("query", sparql);
      return emit(svc.sparql(req));
    }
  } catch (const NetworkError& e) {
    std::cerr << e.what() << '\n';
    return kUpstreamError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kUserError;
  }
  return kOk;
}
