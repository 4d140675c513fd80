#pragma once

#include <atomic>
#include <memory>
#include <mutex>

#include "kgod/cache.hpp"
#include "kgod/extraction.hpp"

namespace kgod {

struct EngineConfig {
  NamespaceConfig ns;
  SourceConfig source;
  ExtractionOptions defaults;
  std::size_t cache_capacity = 1024;
  double cache_ttl = 300;  // seconds; 0 disables caching
};

struct EngineMetrics {
  std::size_t extractions = 0;  // cache misses that ran the pipeline
  double extraction_ms = 0;     // summed over extractions
  CacheStats cache;
  std::size_t upstream_requests = 0;
};

// Shared extraction front end: cache, current mapping set and source.
class Engine {
 public:
  struct Result {
    std::shared_ptr<const ResourceGraph> graph;
    bool cache_hit = false;
  };

  Engine(EngineConfig cfg, std::unique_ptr<WikiSource> source, MappingSet mappings);

  Result extract(const Iri& iri, const ExtractionOptions& opts);
  Result extract(const Iri& iri) { return extract(iri, cfg_.defaults); }

  // Caps max_backlinks at the source configuration's limit.
  ExtractionOptions clamp(ExtractionOptions opts) const;

  std::shared_ptr<const MappingSet> mappings() const;
  // Installs a new mapping set and empties the cache.
  void swap_mappings(MappingSet ms);

  const EngineConfig& config() const { return cfg_; }
  const NamespaceConfig& ns() const { return cfg_.ns; }
  WikiSource& source() { return *source_; }
  EngineMetrics metrics() const;
  void clear_cache() { cache_.clear(); }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  EngineConfig cfg_;
  std::unique_ptr<WikiSource> source_;
  mutable std::mutex mappings_mu_;
  std::shared_ptr<const MappingSet> mappings_;
  Cache<std::shared_ptr<const ResourceGraph>> cache_;
  std::atomic<std::size_t> extractions_{0};
  std::atomic<double> extraction_ms_{0};
};

}  // namespace kgod
