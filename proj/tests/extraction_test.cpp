#include <gtest/gtest.h>

#include "kgod/engine.hpp"
#include "kgod/extraction.hpp"
#include "support/fixtures.hpp"
#include "support/random_corpus.hpp"
#include "support/stub_api.hpp"

using namespace kgod;
using wikitext::parse_wikitext;

namespace {

const NamespaceConfig kNs;

Iri dbr(const std::string& local) { return Iri("http://dbpedia.org/resource/" + local); }
Iri dbo(const std::string& local) { return Iri("http://dbpedia.org/ontology/" + local); }
const Iri kType("http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
const Iri kLabel("http://www.w3.org/2000/01/rdf-schema#label");
const Iri kInteger("http://www.w3.org/2001/XMLSchema#integer");

MappingSet fixture_mappings() { return load_mappings(prop::read_fixture("mappings.txt"), kNs); }

wikitext::ParsedPage fixture_page(const std::string& title) {
  std::string file = title;
  std::replace(file.begin(), file.end(), ' ', '_');
  return parse_wikitext(title, prop::read_fixture("corpus/pages/" + file + ".wiki"));
}

const Graph& lost_highway_outgoing() {
  static const Graph g{{dbr("Lost_Highway"), kType, dbo("Film")},
                       {dbr("Lost_Highway"), dbo("director"), dbr("David_Lynch")},
                       {dbr("Lost_Highway"), dbo("runtime"), Literal::typed("134", kInteger)},
                       {dbr("Lost_Highway"), kLabel, Literal::tagged("Lost Highway", "en")}};
  return g;
}

const Graph& lost_highway_ingoing() {
  static const Graph g{{dbr("Bill_Pullman"), dbo("starring"), dbr("Lost_Highway")},
                       {dbr("Patricia_Arquette"), dbo("starring"), dbr("Lost_Highway")}};
  return g;
}

// Temporary corpus directory populated from (title, wikitext) pairs.
struct TempCorpus {
  std::filesystem::path dir;

  TempCorpus(const std::string& name, const std::vector<std::pair<std::string, std::string>>& pages,
             const std::string& index = "") {
    dir = std::filesystem::temp_directory_path() / ("kgod_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir / "pages");
    for (const auto& [title, src] : pages) std::ofstream(dir / "pages" / FixtureSource::page_file_name(title)) << src;
    std::ofstream(dir / "backlinks.tsv") << index;
  }
  ~TempCorpus() { std::filesystem::remove_all(dir); }
};

// Fails every fetch of one title.
class FlakySource : public FixtureSource {
 public:
  FlakySource(std::filesystem::path dir, std::string bad) : FixtureSource(std::move(dir)), bad_(std::move(bad)) {}

 protected:
  PageFetch do_fetch_page(const std::string& title) override {
    if (title == bad_) throw NetworkError("flaky");
    return FixtureSource::do_fetch_page(title);
  }

 private:
  std::string bad_;
};

}  // namespace

class FixtureExtraction : public ::testing::Test {
 protected:
  FixtureSource source{prop::fixture_path("corpus")};
  MappingSet ms = fixture_mappings();
  ExtractionContext ctx{source, ms, kNs, 4};
};

TEST_F(FixtureExtraction, LostHighway) {
  const ResourceGraph rg = extract_resource(dbr("Lost_Highway"), {}, ctx);
  EXPECT_EQ(rg.subject, dbr("Lost_Highway"));
  EXPECT_EQ(rg.outgoing, lost_highway_outgoing());
  EXPECT_EQ(rg.ingoing, lost_highway_ingoing());
  // Three sentences requested, two available.
  EXPECT_EQ(rg.abstract, Literal::tagged("Lost Highway is a 1997 film directed by David Lynch. "
                                         "It stars Bill Pullman and Patricia Arquette.",
                                         "en"));
  EXPECT_EQ(rg.provenance.backlink_count, 3u);
  EXPECT_EQ(rg.provenance.pages_processed, 4u);
  EXPECT_FALSE(rg.provenance.backlinks_truncated);
  EXPECT_TRUE(rg.provenance.coercion_warnings.empty());
  for (double ms : rg.provenance.elapsed_ms) EXPECT_GE(ms, 0.0);
  EXPECT_EQ(rg.all_triples(kNs).size(), 7u);
}

TEST_F(FixtureExtraction, WithoutIngoing) {
  ExtractionOptions opts;
  opts.include_ingoing = false;
  const std::size_t before = source.request_count();
  const ResourceGraph rg = extract_resource(dbr("Lost_Highway"), opts, ctx);
  EXPECT_EQ(rg.outgoing, lost_highway_outgoing());
  EXPECT_TRUE(rg.ingoing.empty());
  EXPECT_EQ(rg.provenance.backlink_count, 0u);
  EXPECT_EQ(rg.provenance.pages_processed, 1u);
  EXPECT_EQ(source.request_count() - before, 1u);
  EXPECT_EQ(rg.all_triples(kNs).size(), 5u);
}

TEST_F(FixtureExtraction, BacklinkCap) {
  for (std::size_t m : {0u, 1u, 2u, 3u, 10u}) {
    ExtractionOptions opts;
    opts.max_backlinks = m;
    const ResourceGraph rg = extract_resource(dbr("Lost_Highway"), opts, ctx);
    EXPECT_EQ(rg.provenance.pages_processed, 1 + std::min<std::size_t>(m, 3));
    EXPECT_EQ(rg.provenance.backlinks_truncated, m < 3);
  }
}

TEST_F(FixtureExtraction, MissingResource) {
  try {
    extract_resource(dbr("No_Such_Page"), {}, ctx);
    FAIL();
  } catch (const ResourceMissing& e) {
    EXPECT_EQ(e.iri(), dbr("No_Such_Page"));
  }
  EXPECT_THROW(extract_resource(dbo("director"), {}, ctx), ForeignIri);
}

TEST_F(FixtureExtraction, Outgoing) {
  EXPECT_EQ(extract_outgoing(fixture_page("Lost Highway"), dbr("Lost_Highway"), ms, kNs), lost_highway_outgoing());
  EXPECT_EQ(extract_outgoing(parse_wikitext("Empty", ""), dbr("Empty"), ms, kNs),
            (Graph{{dbr("Empty"), kLabel, Literal::tagged("Empty", "en")}}));
  const Graph two = extract_outgoing(
      parse_wikitext("Both", "{{Infobox film|runtime=90}}{{Infobox person|occupation=Actor}}"), dbr("Both"), ms, kNs);
  EXPECT_TRUE(two.contains({dbr("Both"), kType, dbo("Film")}));
  EXPECT_TRUE(two.contains({dbr("Both"), kType, dbo("Person")}));
  EXPECT_EQ(two.size(), 5u);
}

TEST_F(FixtureExtraction, Ingoing) {
  const std::vector<wikitext::ParsedPage> pages{fixture_page("Bill Pullman"), fixture_page("Patricia Arquette"),
                                                fixture_page("David Lynch")};
  EXPECT_EQ(extract_ingoing(dbr("Lost_Highway"), pages, ms, kNs), lost_highway_ingoing());
  EXPECT_TRUE(extract_ingoing(dbr("Lost_Highway"), {}, ms, kNs).empty());
  EXPECT_TRUE(extract_ingoing(dbr("Lost_Highway"), {fixture_page("David Lynch")}, ms, kNs).empty());
}

TEST_F(FixtureExtraction, Abstract) {
  ExtractionOptions opts;
  opts.abstract_sentences = 3;
  EXPECT_EQ(extract_abstract(fixture_page("Lost Highway"), opts),
            Literal::tagged("Lost Highway is a 1997 film directed by David Lynch. "
                            "It stars Bill Pullman and Patricia Arquette.",
                            "en"));
  opts.abstract_sentences = 1;
  EXPECT_EQ(extract_abstract(fixture_page("Lost Highway"), opts),
            Literal::tagged("Lost Highway is a 1997 film directed by David Lynch.", "en"));
  EXPECT_FALSE(extract_abstract(parse_wikitext("X", "{{Infobox film|runtime=1}}"), opts));
  opts.abstract_language = "de";
  EXPECT_EQ(extract_abstract(fixture_page("Bill Pullman"), opts)->language(), "de");
}

TEST(ExtractionTest, PageWithoutInfoboxOrBacklinks) {
  TempCorpus corpus("plain", {{"Plain", "Just text."}});
  FixtureSource source(corpus.dir);
  const MappingSet ms = fixture_mappings();
  const ResourceGraph rg = extract_resource(dbr("Plain"), {}, {source, ms, kNs});
  EXPECT_EQ(rg.outgoing, (Graph{{dbr("Plain"), kLabel, Literal::tagged("Plain", "en")}}));
  EXPECT_TRUE(rg.ingoing.empty());
  EXPECT_EQ(rg.abstract, Literal::tagged("Just text.", "en"));
}

TEST(ExtractionTest, FollowsRedirects) {
  TempCorpus corpus("redirect",
                    {{"Lost Highway", prop::read_fixture("corpus/pages/Lost_Highway.wiki")},
                     {"Lost Highway (film)", "#REDIRECT [[Lost Highway]]"},
                     {"LH", "#redirect [[Lost Highway (film)]]"}},
                    "Lost_Highway\tLost_Highway_(film)\n");
  FixtureSource source(corpus.dir);
  const MappingSet ms = fixture_mappings();
  const ResourceGraph rg = extract_resource(dbr("LH"), {}, {source, ms, kNs});
  EXPECT_EQ(rg.subject, dbr("Lost_Highway"));
  EXPECT_EQ(rg.outgoing, lost_highway_outgoing());
  const Iri redirect("http://dbpedia.org/ontology/wikiPageRedirects");
  EXPECT_TRUE(rg.ingoing.contains({dbr("LH"), redirect, dbr("Lost_Highway")}));
  EXPECT_TRUE(rg.ingoing.contains({dbr("Lost_Highway_(film)"), redirect, dbr("Lost_Highway")}));
  EXPECT_EQ(rg.provenance.redirects, (std::vector<std::string>{"LH", "Lost Highway (film)"}));
  // The redirect page listed as a backlink is skipped, not extracted.
  EXPECT_EQ(rg.provenance.pages_processed, 1u);
  EXPECT_EQ(rg.provenance.backlink_count, 1u);
}

TEST(ExtractionTest, RedirectLimits) {
  TempCorpus corpus("redirect_loop", {{"A", "#REDIRECT [[B]]"},
                                      {"B", "#REDIRECT [[C]]"},
                                      {"C", "#REDIRECT [[D]]"},
                                      {"D", "#REDIRECT [[E]]"},
                                      {"E", "end."},
                                      {"X", "#REDIRECT [[Y]]"},
                                      {"Y", "#REDIRECT [[X]]"}});
  FixtureSource source(corpus.dir);
  const MappingSet ms = fixture_mappings();
  const ExtractionContext ctx{source, ms, kNs};
  ExtractionOptions opts;
  opts.follow_redirects = 3;
  try {
    extract_resource(dbr("A"), opts, ctx);
    FAIL();
  } catch (const RedirectLoop& e) {
    EXPECT_GT(e.chain().size(), opts.follow_redirects);
  }
  EXPECT_EQ(extract_resource(dbr("B"), opts, ctx).subject, dbr("E"));
  opts.follow_redirects = 0;
  EXPECT_THROW(extract_resource(dbr("D"), opts, ctx), RedirectLoop);
  opts.follow_redirects = 10;
  EXPECT_THROW(extract_resource(dbr("X"), opts, ctx), RedirectLoop);
}

TEST(ExtractionTest, BacklinkFailureIsNotFatal) {
  FlakySource source(prop::fixture_path("corpus"), "Bill Pullman");
  const MappingSet ms = fixture_mappings();
  const ResourceGraph rg = extract_resource(dbr("Lost_Highway"), {}, {source, ms, kNs});
  EXPECT_EQ(rg.ingoing, (Graph{{dbr("Patricia_Arquette"), dbo("starring"), dbr("Lost_Highway")}}));
  EXPECT_EQ(rg.provenance.pages_processed, 3u);
  ASSERT_EQ(rg.provenance.source_warnings.size(), 1u);
  EXPECT_NE(rg.provenance.source_warnings[0].find("Bill Pullman"), std::string::npos);
}

TEST(ExtractionTest, MainPageFailureIsSourceFailure) {
  prop::StubApi stub;
  stub.set_failing(true);
  LiveMode m;
  m.api_endpoint = stub.endpoint();
  m.backoff_base = 0.001;
  LiveSource source(m);
  const MappingSet ms = fixture_mappings();
  EXPECT_THROW(extract_resource(dbr("Lost_Highway"), {}, {source, ms, kNs}), SourceFailure);
}

TEST(ExtractionTest, LiveMatchesFixture) {
  prop::StubApi stub;
  stub.load_corpus(prop::fixture_path("corpus"));
  LiveMode m;
  m.api_endpoint = stub.endpoint();
  m.rate_limit = 1000;
  LiveSource live(m);
  FixtureSource fixture(prop::fixture_path("corpus"));
  const MappingSet ms = fixture_mappings();
  for (const char* local : {"Lost_Highway", "David_Lynch", "Bill_Pullman"}) {
    const ResourceGraph a = extract_resource(dbr(local), {}, {live, ms, kNs});
    const ResourceGraph b = extract_resource(dbr(local), {}, {fixture, ms, kNs});
    EXPECT_EQ(a.all_triples(kNs), b.all_triples(kNs)) << local;
  }
}

TEST(ExtractionOptionsTest, Validation) {
  ExtractionOptions opts;
  EXPECT_NO_THROW(opts.validate());
  opts.abstract_sentences = 0;
  EXPECT_THROW(opts.validate(), Error);
  EXPECT_NE(ExtractionOptions{}.digest(), opts.digest());
}

TEST(ExtractionPropertyTest, PartitionOverRandomCorpora) {
  prop::Gen gen(2024);
  const MappingSet ms = load_mappings(prop::kCorpusMappings, kNs);
  const auto dir = std::filesystem::temp_directory_path() / "kgod_partition";
  std::size_t ingoing_seen = 0;
  for (int round = 0; round < 20; ++round) {
    const prop::RandomCorpus corpus = prop::make_random_corpus(gen, dir, 20 + gen.below(10));
    const Graph global = prop::materialize(corpus, ms, kNs);
    FixtureSource source(corpus.dir);
    for (const std::string& title : corpus.titles) {
      const Iri s = title_to_iri(title, kNs);
      const ResourceGraph rg = extract_resource(s, {}, {source, ms, kNs});
      Graph want_out, want_in;
      for (const Triple& t : global) {
        if (t.subject == s) want_out.insert(t);
        if (const Iri* o = as_iri(t.object); o && *o == s && t.subject != s) want_in.insert(t);
      }
      EXPECT_EQ(rg.outgoing, want_out) << title;
      EXPECT_EQ(rg.ingoing, want_in) << title;
      ingoing_seen += rg.ingoing.size();
      for (const Triple& t : rg.outgoing) EXPECT_EQ(t.subject, s);
      for (const Triple& t : rg.ingoing) {
        EXPECT_EQ(t.object, Term(s));
        EXPECT_NE(t.subject, s);
      }
      if (rg.abstract) EXPECT_TRUE(rg.abstract->language());
    }
  }
  EXPECT_GT(ingoing_seen, 100u);
  std::filesystem::remove_all(dir);
}

TEST(EngineTest, CacheHitPerformsNoFetches) {
  EngineConfig cfg;
  cfg.source.mode = FixtureMode{prop::fixture_path("corpus")};
  Engine engine(cfg, make_source(cfg.source), fixture_mappings());
  const auto first = engine.extract(dbr("Lost_Highway"));
  EXPECT_FALSE(first.cache_hit);
  const std::size_t after_first = engine.source().request_count();
  const auto second = engine.extract(dbr("Lost_Highway"));
  EXPECT_TRUE(second.cache_hit);
  EXPECT_EQ(engine.source().request_count(), after_first);
  EXPECT_EQ(second.graph->all_triples(kNs), first.graph->all_triples(kNs));

  ExtractionOptions other;
  other.include_ingoing = false;
  EXPECT_FALSE(engine.extract(dbr("Lost_Highway"), other).cache_hit);
}

TEST(EngineTest, ZeroTtlAlwaysFetches) {
  EngineConfig cfg;
  cfg.source.mode = FixtureMode{prop::fixture_path("corpus")};
  cfg.cache_ttl = 0;
  Engine engine(cfg, make_source(cfg.source), fixture_mappings());
  std::size_t before = engine.source().request_count();
  for (int i = 0; i < 3; ++i) {
    EXPECT_FALSE(engine.extract(dbr("Lost_Highway")).cache_hit);
    EXPECT_GT(engine.source().request_count(), before);
    before = engine.source().request_count();
  }
}

TEST(EngineTest, SwapMappingsClearsCache) {
  EngineConfig cfg;
  cfg.source.mode = FixtureMode{prop::fixture_path("corpus")};
  Engine engine(cfg, make_source(cfg.source), fixture_mappings());
  engine.extract(dbr("Lost_Highway"));
  EXPECT_EQ(engine.cache_size(), 1u);
  engine.swap_mappings(load_mappings(""));
  EXPECT_EQ(engine.cache_size(), 0u);
  const auto r = engine.extract(dbr("Lost_Highway"));
  EXPECT_FALSE(r.cache_hit);
  EXPECT_EQ(r.graph->outgoing.size(), 1u);
}

TEST(EngineTest, RequestsCannotRaiseTheBacklinkCap) {
  EngineConfig cfg;
  cfg.source.mode = FixtureMode{prop::fixture_path("corpus")};
  cfg.source.max_backlinks = 2;
  Engine engine(cfg, make_source(cfg.source), fixture_mappings());
  ExtractionOptions opts;
  opts.max_backlinks = 100;
  EXPECT_EQ(engine.clamp(opts).max_backlinks, 2u);
  opts.max_backlinks = 1;
  EXPECT_EQ(engine.clamp(opts).max_backlinks, 1u);
  EXPECT_EQ(engine.extract(dbr("Lost_Highway")).graph->provenance.pages_processed, 3u);
}
