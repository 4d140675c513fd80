#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgod/error.hpp"
#include "kgod/rdf.hpp"
#include "kgod/wikitext.hpp"

namespace kgod {

namespace range {
struct ObjectResource {
  friend bool operator==(const ObjectResource&, const ObjectResource&) = default;
};
struct PlainString {
  std::string language;
  friend bool operator==(const PlainString&, const PlainString&) = default;
};
struct Integer {
  friend bool operator==(const Integer&, const Integer&) = default;
};
struct Double {
  friend bool operator==(const Double&, const Double&) = default;
};
struct Date {
  friend bool operator==(const Date&, const Date&) = default;
};
}  // namespace range

using RangeKind = std::variant<range::ObjectResource, range::PlainString, range::Integer, range::Double, range::Date>;

// Keyword as written in mapping files: object, string@en, integer, double, date.
std::string range_keyword(const RangeKind& r);

struct PropertyMapping {
  std::string param;
  Iri predicate;
  RangeKind range;
  friend bool operator==(const PropertyMapping&, const PropertyMapping&) = default;
};

struct TemplateMapping {
  std::string template_name;  // normalized like TemplateCall::name
  Iri class_iri;
  std::vector<PropertyMapping> properties;
  friend bool operator==(const TemplateMapping&, const TemplateMapping&) = default;
};

struct MappingSet {
  std::map<std::string, TemplateMapping> by_template;
  std::string version;  // content hash of the source file
  std::chrono::system_clock::time_point loaded_at;

  const TemplateMapping* find(std::string_view template_name) const;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& reason)
      : Error("mapping line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateTemplate : public Error {
 public:
  explicit DuplicateTemplate(const std::string& name) : Error("duplicate template mapping: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class UnknownRange : public Error {
 public:
  explicit UnknownRange(const std::string& keyword) : Error("unknown range: " + keyword), keyword_(keyword) {}
  const std::string& keyword() const { return keyword_; }

 private:
  std::string keyword_;
};

class CoercionError : public Error {
 public:
  CoercionError(const std::string& text, const RangeKind& r)
      : Error("cannot read \"" + text + "\" as " + range_keyword(r)), text_(text), range_(r) {}
  const std::string& text() const { return text_; }
  const RangeKind& range() const { return range_; }

 private:
  std::string text_;
  RangeKind range_;
};

struct CoercionWarning {
  std::string page;
  std::string param;
  std::string reason;
  friend bool operator==(const CoercionWarning&, const CoercionWarning&) = default;
};

// dbo:/dbr: resolve against ns; rdf:, rdfs: and xsd: are fixed.
MappingSet load_mappings(std::string_view bytes, const NamespaceConfig& ns = {});

Literal coerce_literal(std::string_view text, const RangeKind& r);

// Coercion failures drop the triple and are appended to warnings when given.
Graph apply_mappings(const wikitext::ParsedPage& page, const Iri& subject, const MappingSet& ms,
                     const NamespaceConfig& ns, std::vector<CoercionWarning>* warnings = nullptr);

}  // namespace kgod
