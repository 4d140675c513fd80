#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgod/error.hpp"
#include "kgod/mappings.hpp"
#include "kgod/rdf.hpp"
#include "kgod/wiki_source.hpp"
#include "kgod/wikitext.hpp"

namespace kgod {

struct ExtractionOptions {
  std::size_t abstract_sentences = 3;
  std::string abstract_language = "en";
  std::size_t follow_redirects = 3;
  bool include_ingoing = true;
  std::optional<std::size_t> max_backlinks;  // nullopt: all backlinks

  void validate() const;
  // Stable text form, used in cache keys.
  std::string digest() const;
};

enum class Step { Resolve, Backlinks, Fetch, Generate, Abstract };

struct Provenance {
  std::optional<std::int64_t> revision_id;
  std::size_t backlink_count = 0;
  bool backlinks_truncated = false;
  std::size_t pages_processed = 0;
  std::vector<CoercionWarning> coercion_warnings;
  std::vector<std::string> source_warnings;  // skipped backlink pages and similar
  std::vector<std::string> redirects;        // titles followed before the final page
  std::array<double, 5> elapsed_ms{};        // indexed by Step

  double total_ms() const;
};

struct ResourceGraph {
  Iri subject;
  Graph outgoing;  // subject is always `subject`
  Graph ingoing;   // object is always `subject`, subject never is
  std::optional<Literal> abstract;
  Provenance provenance;

  // outgoing, ingoing and the abstract triple.
  Graph all_triples(const NamespaceConfig& ns) const;
};

class ExtractionError : public Error {
 public:
  using Error::Error;
};

class ResourceMissing : public ExtractionError {
 public:
  explicit ResourceMissing(const Iri& iri) : ExtractionError("no page for " + iri.str()), iri_(iri) {}
  const Iri& iri() const { return iri_; }

 private:
  Iri iri_;
};

class RedirectLoop : public ExtractionError {
 public:
  explicit RedirectLoop(std::vector<std::string> chain);
  const std::vector<std::string>& chain() const { return chain_; }

 private:
  std::vector<std::string> chain_;
};

class SourceFailure : public ExtractionError {
 public:
  explicit SourceFailure(const std::string& cause) : ExtractionError("source failure: " + cause) {}
};

struct ExtractionContext {
  WikiSource& source;
  const MappingSet& mappings;
  const NamespaceConfig& ns;
  std::size_t fetch_parallelism = 4;
};

ResourceGraph extract_resource(const Iri& iri, const ExtractionOptions& opts, const ExtractionContext& ctx);

Graph extract_outgoing(const wikitext::ParsedPage& page, const Iri& subject, const MappingSet& ms,
                       const NamespaceConfig& ns, std::vector<CoercionWarning>* warnings = nullptr);

// Triples of the pages' outgoing graphs that point at subject.
Graph extract_ingoing(const Iri& subject, const std::vector<wikitext::ParsedPage>& backlink_pages,
                      const MappingSet& ms, const NamespaceConfig& ns,
                      std::vector<CoercionWarning>* warnings = nullptr);

std::optional<Literal> extract_abstract(const wikitext::ParsedPage& page, const ExtractionOptions& opts);

}  // namespace kgod
