#include "kgod/engine.hpp"

namespace kgod {

Engine::Engine(EngineConfig cfg, std::unique_ptr<WikiSource> source, MappingSet mappings)
    : cfg_(std::move(cfg)),
      source_(std::move(source)),
      mappings_(std::make_shared<const MappingSet>(std::move(mappings))),
      cache_(cfg_.cache_capacity) {
  cfg_.ns.validate();
  cfg_.source.validate();
  cfg_.defaults = clamp(cfg_.defaults);
  cfg_.defaults.validate();
}

ExtractionOptions Engine::clamp(ExtractionOptions opts) const {
  if (const auto cap = cfg_.source.max_backlinks) {
    opts.max_backlinks = opts.max_backlinks ? std::min(*opts.max_backlinks, *cap) : *cap;
  }
  return opts;
}

std::shared_ptr<const MappingSet> Engine::mappings() const {
  std::lock_guard lock(mappings_mu_);
  return mappings_;
}

void Engine::swap_mappings(MappingSet ms) {
  auto fresh = std::make_shared<const MappingSet>(std::move(ms));
  {
    std::lock_guard lock(mappings_mu_);
    mappings_ = std::move(fresh);
  }
  cache_.clear();
}

Engine::Result Engine::extract(const Iri& iri, const ExtractionOptions& requested) {
  const ExtractionOptions opts = clamp(requested);
  const std::shared_ptr<const MappingSet> ms = mappings();
  const std::string key = iri.str() + '\n' + ms->version + '\n' + opts.digest();
  auto [graph, hit] = cache_.get_or_compute(key, std::chrono::duration<double>(cfg_.cache_ttl), [&] {
    const ExtractionContext ctx{*source_, *ms, cfg_.ns, cfg_.source.fetch_parallelism};
    auto rg = std::make_shared<const ResourceGraph>(extract_resource(iri, opts, ctx));
    ++extractions_;
    extraction_ms_ += rg->provenance.total_ms();
    return rg;
  });
  return {std::move(graph), hit};
}

EngineMetrics Engine::metrics() const {
  return {extractions_.load(), extraction_ms_.load(), cache_.stats(), source_->request_count()};
}

}  // namespace kgod
