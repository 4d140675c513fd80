#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

namespace kgod {

// An absolute IRI. Construction validates; an Iri value is always well formed.
class Iri {
 public:
  explicit Iri(std::string value);

  static bool is_valid(std::string_view value);

  const std::string& str() const { return value_; }
  bool starts_with(std::string_view prefix) const { return std::string_view(value_).starts_with(prefix); }

  friend bool operator==(const Iri&, const Iri&) = default;
  friend auto operator<=>(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kDbr = "http://dbpedia.org/resource/";
inline constexpr std::string_view kDbo = "http://dbpedia.org/ontology/";

Iri xsd(std::string_view local);
}  // namespace vocab

// A literal is either plain, language tagged, or typed; never both tagged and typed.
class Literal {
 public:
  explicit Literal(std::string lexical) : lexical_(std::move(lexical)) {}

  static Literal typed(std::string lexical, Iri datatype);
  static Literal tagged(std::string lexical, std::string language);

  const std::string& lexical() const { return lexical_; }
  const std::optional<Iri>& datatype() const { return datatype_; }
  const std::optional<std::string>& language() const { return language_; }

  friend bool operator==(const Literal&, const Literal&) = default;

 private:
  std::string lexical_;
  std::optional<Iri> datatype_;
  std::optional<std::string> language_;
};

using Term = std::variant<Iri, Literal>;

inline bool is_iri(const Term& t) { return std::holds_alternative<Iri>(t); }
inline const Iri* as_iri(const Term& t) { return std::get_if<Iri>(&t); }
inline const Literal* as_literal(const Term& t) { return std::get_if<Literal>(&t); }

// N-Triples rendering of one term, e.g. `<http://x>` or `"a\"b"@en`.
std::string to_ntriples(const Term& term);
std::string to_ntriples(const Iri& iri);

struct Triple {
  Iri subject;
  Iri predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// Orders by the N-Triples rendering of subject, predicate, object.
bool operator<(const Triple& a, const Triple& b);
std::weak_ordering compare_terms(const Term& a, const Term& b);

// A duplicate-free set of triples with deterministic iteration order.
class Graph {
 public:
  using const_iterator = std::set<Triple>::const_iterator;

  Graph() = default;
  Graph(std::initializer_list<Triple> triples);

  bool insert(Triple t) { return triples_.insert(std::move(t)).second; }
  void merge(const Graph& other);
  bool contains(const Triple& t) const { return triples_.count(t) != 0; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::set<Triple> triples_;
};

struct NamespaceConfig {
  Iri resource_base{std::string(vocab::kDbr)};
  Iri ontology_base{std::string(vocab::kDbo)};
  Iri abstract_predicate{std::string(vocab::kDbo) + "abstract"};
  Iri type_predicate{std::string(vocab::kRdf) + "type"};
  Iri label_predicate{std::string(vocab::kRdfs) + "label"};
  Iri redirect_predicate{std::string(vocab::kDbo) + "wikiPageRedirects"};
  std::string label_language = "en";

  // Throws InvalidIri when a base does not end in '/' or '#'.
  void validate() const;
};

// Trims, collapses whitespace and underscores, uppercases the first character.
// Valid %XX escapes are decoded first, since titles never contain them.
std::string normalize_title(std::string_view title);

// Percent-encoded local name of a title (the part after the resource base).
std::string encode_local_name(std::string_view title);

Iri title_to_iri(std::string_view title, const NamespaceConfig& ns);
std::string iri_to_title(const Iri& iri, const NamespaceConfig& ns);

std::string serialize_ntriples(const Graph& g);
Graph parse_ntriples(std::string_view bytes);

std::string serialize_turtle(const Graph& g, const NamespaceConfig& ns);
// Reads the Turtle subset used by this project: @prefix/PREFIX, prefixed names,
// IRIs, literals, 'a', and ';' / ',' lists. No blank nodes or collections.
Graph parse_turtle(std::string_view bytes);

}  // namespace kgod
