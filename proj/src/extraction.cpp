#include "kgod/extraction.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace kgod {

namespace {

class StepTimer {
 public:
  explicit StepTimer(Provenance& p) : p_(p) {}

  template <class F>
  decltype(auto) run(Step step, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      Provenance& p;
      Step step;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        p.elapsed_ms[static_cast<std::size_t>(step)] +=
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
    } record{p_, step, start};
    return f();
  }

 private:
  Provenance& p_;
};

std::string join_chain(const std::vector<std::string>& chain) {
  std::string out;
  for (const std::string& t : chain) {
    if (!out.empty()) out += " -> ";
    out += t;
  }
  return out;
}

}  // namespace

void ExtractionOptions::validate() const {
  if (abstract_sentences < 1) throw Error("abstract_sentences must be at least 1");
  if (abstract_language.empty()) throw Error("abstract_language is empty");
}

std::string ExtractionOptions::digest() const {
  return "s=" + std::to_string(abstract_sentences) + ";l=" + abstract_language +
         ";r=" + std::to_string(follow_redirects) + ";i=" + (include_ingoing ? "1" : "0") +
         ";m=" + (max_backlinks ? std::to_string(*max_backlinks) : "all");
}

double Provenance::total_ms() const { return std::accumulate(elapsed_ms.begin(), elapsed_ms.end(), 0.0); }

Graph ResourceGraph::all_triples(const NamespaceConfig& ns) const {
  Graph g = outgoing;
  g.merge(ingoing);
  if (abstract) g.insert({subject, ns.abstract_predicate, *abstract});
  return g;
}

RedirectLoop::RedirectLoop(std::vector<std::string> chain)
    : ExtractionError("redirect chain too long or cyclic: " + join_chain(chain)), chain_(std::move(chain)) {}

Graph extract_outgoing(const wikitext::ParsedPage& page, const Iri& subject, const MappingSet& ms,
                       const NamespaceConfig& ns, std::vector<CoercionWarning>* warnings) {
  return apply_mappings(page, subject, ms, ns, warnings);
}

Graph extract_ingoing(const Iri& subject, const std::vector<wikitext::ParsedPage>& backlink_pages,
                      const MappingSet& ms, const NamespaceConfig& ns, std::vector<CoercionWarning>* warnings) {
  Graph g;
  for (const wikitext::ParsedPage& page : backlink_pages) {
    Iri source = title_to_iri(page.title, ns);
    if (source == subject) continue;
    for (const Triple& t : extract_outgoing(page, source, ms, ns, warnings)) {
      if (const Iri* o = as_iri(t.object); o && *o == subject) g.insert(t);
    }
  }
  return g;
}

std::optional<Literal> extract_abstract(const wikitext::ParsedPage& page, const ExtractionOptions& opts) {
  const std::string text = wikitext::first_sentences(wikitext::strip_to_plaintext(page), opts.abstract_sentences);
  if (text.empty()) return std::nullopt;
  return Literal::tagged(text, opts.abstract_language);
}

ResourceGraph extract_resource(const Iri& iri, const ExtractionOptions& opts, const ExtractionContext& ctx) {
  opts.validate();
  Provenance prov;
  StepTimer timer(prov);

  // 1. IRI to title.
  std::string title = timer.run(Step::Resolve, [&] { return iri_to_title(iri, ctx.ns); });

  // 3a. Main page, following redirects.
  std::vector<std::string> chain{title};
  wikitext::ParsedPage page;
  PageFetch fetch;
  timer.run(Step::Fetch, [&] {
    while (true) {
      try {
        fetch = ctx.source.fetch_page_source(title);
      } catch (const Error& e) {
        throw SourceFailure(e.what());
      }
      if (fetch.missing) throw ResourceMissing(title_to_iri(title, ctx.ns));
      page = wikitext::parse_wikitext(fetch.resolved_title, *fetch.wikitext);
      if (!page.is_redirect()) return;
      const std::string target = normalize_title(*page.redirect_target);
      const bool cycle = std::find(chain.begin(), chain.end(), target) != chain.end();
      chain.push_back(target);
      if (cycle || chain.size() - 1 > opts.follow_redirects) throw RedirectLoop(chain);
      title = target;
    }
  });
  prov.revision_id = fetch.revision_id;
  chain.pop_back();
  prov.redirects = chain;

  ResourceGraph rg{title_to_iri(title, ctx.ns), {}, {}, std::nullopt, {}};
  for (const std::string& from : chain) {
    rg.ingoing.insert({title_to_iri(from, ctx.ns), ctx.ns.redirect_predicate, rg.subject});
  }

  // 2. Backlinks of the final page.
  std::vector<std::string> backlinks;
  if (opts.include_ingoing) {
    timer.run(Step::Backlinks, [&] {
      try {
        BacklinkList list = ctx.source.fetch_backlinks(title, opts.max_backlinks);
        backlinks = std::move(list.backlinks);
        prov.backlinks_truncated = list.truncated;
      } catch (const Error& e) {
        prov.source_warnings.push_back(std::string("backlinks unavailable: ") + e.what());
      }
    });
  }
  prov.backlink_count = backlinks.size();

  // 3b. Backlink page sources.
  std::vector<wikitext::ParsedPage> backlink_pages;
  timer.run(Step::Fetch, [&] {
    const std::vector<FetchOutcome> outcomes = fetch_many(ctx.source, backlinks, ctx.fetch_parallelism);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const FetchOutcome& out = outcomes[i];
      if (!out.page) {
        try {
          std::rethrow_exception(out.error);
        } catch (const std::exception& e) {
          prov.source_warnings.push_back(backlinks[i] + ": " + e.what());
        }
        continue;
      }
      if (out.page->missing) continue;
      wikitext::ParsedPage p = wikitext::parse_wikitext(out.page->resolved_title, *out.page->wikitext);
      if (p.is_redirect()) continue;
      backlink_pages.push_back(std::move(p));
    }
  });

  // 4. RDF for every page.
  timer.run(Step::Generate, [&] {
    rg.outgoing = extract_outgoing(page, rg.subject, ctx.mappings, ctx.ns, &prov.coercion_warnings);
    rg.ingoing.merge(extract_ingoing(rg.subject, backlink_pages, ctx.mappings, ctx.ns, &prov.coercion_warnings));
  });
  prov.pages_processed = 1 + backlink_pages.size();

  // 5. Abstract.
  rg.abstract = timer.run(Step::Abstract, [&] { return extract_abstract(page, opts); });

  rg.provenance = std::move(prov);
  return rg;
}

}  // namespace kgod
