#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgod/error.hpp"
#include "kgod/extraction.hpp"
#include "kgod/rdf.hpp"

namespace kgod {

struct Var {
  std::string name;  // without '?'
  friend bool operator==(const Var&, const Var&) = default;
};

using PatternTerm = std::variant<Var, Iri, Literal>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

struct QueryAst {
  std::optional<std::vector<std::string>> select_vars;  // nullopt for SELECT *
  std::vector<TriplePattern> patterns;

  // Projected variables: the select list, or every variable in order of first use.
  std::vector<std::string> variables() const;
  friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& expected)
      : Error("parse error at " + std::to_string(position) + ": expected " + expected),
        position_(position),
        expected_(expected) {}
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

// Valid SPARQL outside the supported fragment (OPTIONAL, FILTER, paths, ...).
class UnsupportedSyntax : public Error {
 public:
  explicit UnsupportedSyntax(const std::string& feature) : Error("unsupported: " + feature), feature_(feature) {}
  const std::string& feature() const { return feature_; }

 private:
  std::string feature_;
};

// Built-in prefixes dbr:, dbo: (from ns), rdf:, rdfs:, xsd:. PREFIX may override.
QueryAst parse_query(std::string_view text, const NamespaceConfig& ns = {});

enum class AnchorPosition { Subject, Object };

struct Anchor {
  Iri iri;
  AnchorPosition position;
  friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct Supported {
  std::vector<Anchor> anchors;  // one per pattern
};

enum class UnsupportedReason { NoFixedResource, UnanchoredVariable, UnsupportedSyntax };
std::string_view to_string(UnsupportedReason r);

struct Unsupported {
  UnsupportedReason reason;
  std::optional<std::size_t> pattern_index;
  std::string detail;
};

using Classification = std::variant<Supported, Unsupported>;

// Only IRIs in the resource namespace count as fixed resources.
Classification classify(const QueryAst& ast, const NamespaceConfig& ns = {});

struct BindingSet {
  std::vector<std::string> variables;
  std::vector<std::vector<Term>> rows;  // sorted, distinct; rows[i][j] binds variables[j]
  friend bool operator==(const BindingSet&, const BindingSet&) = default;
};

class NotSupported : public Error {
 public:
  explicit NotSupported(const Unsupported& u)
      : Error("query not supported: " + std::string(to_string(u.reason)) + (u.detail.empty() ? "" : " " + u.detail)) {}
};

class QueryEvaluationError : public Error {
 public:
  QueryEvaluationError(const Iri& anchor, std::exception_ptr cause, const std::string& what)
      : Error("extraction of " + anchor.str() + " failed: " + what), anchor_(anchor), cause_(std::move(cause)) {}
  const Iri& anchor() const { return anchor_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  Iri anchor_;
  std::exception_ptr cause_;
};

using Extractor = std::function<std::shared_ptr<const ResourceGraph>(const Iri&)>;

// Extracts each distinct anchor once (up to `parallelism` at a time), matches
// every pattern against its anchor's graph and joins the results.
BindingSet evaluate(const QueryAst& ast, const Extractor& extract, const NamespaceConfig& ns = {},
                    std::size_t parallelism = 4);

// Sorts and deduplicates rows in place.
void normalize_rows(BindingSet& b);

// SPARQL 1.1 Query Results JSON, compact, rows in lexicographic order.
std::string bindings_to_sparql_json(const BindingSet& b);

}  // namespace kgod
