#include "kgod/rdf.hpp"

#include <cstdio>

#include "kgod/error.hpp"
#include "kgod/text.hpp"

namespace kgod {

namespace {

bool is_forbidden_iri_char(unsigned char c) {
  if (c <= 0x20 || c == 0x7F) return true;
  switch (c) {
    case '<':
    case '>':
    case '"':
    case '{':
    case '}':
    case '|':
    case '^':
    case '`':
    case '\\':
      return true;
    default:
      return false;
  }
}

bool is_language_tag(std::string_view tag) {
  if (tag.empty()) return false;
  bool first_subtag = true;
  std::size_t len = 0;
  for (char c : tag) {
    const auto u = static_cast<unsigned char>(c);
    if (c == '-') {
      if (len == 0) return false;
      first_subtag = false;
      len = 0;
      continue;
    }
    const bool ok = first_subtag ? std::isalpha(u) != 0 : std::isalnum(u) != 0;
    if (!ok) return false;
    ++len;
  }
  return len > 0;
}

// Compares `<a>` with `<b>` without building the strings.
std::weak_ordering compare_iri_rendering(std::string_view a, std::string_view b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) {
      return static_cast<unsigned char>(a[i]) <=> static_cast<unsigned char>(b[i]);
    }
  }
  if (a.size() == b.size()) return std::weak_ordering::equivalent;
  const auto next_a = a.size() > n ? static_cast<unsigned char>(a[n]) : static_cast<unsigned char>('>');
  const auto next_b = b.size() > n ? static_cast<unsigned char>(b[n]) : static_cast<unsigned char>('>');
  return next_a <=> next_b;
}

void escape_string(std::string& out, std::string_view s) {
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    switch (c) {
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      default:
        if (u < 0x20 || u == 0x7F) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(u));
          out += buf;
        } else {
          out += c;
        }
    }
  }
}

std::string literal_rendering(const Literal& lit) {
  std::string out = "\"";
  escape_string(out, lit.lexical());
  out += '"';
  if (lit.language()) {
    out += '@';
    out += *lit.language();
  } else if (lit.datatype()) {
    out += "^^<";
    out += lit.datatype()->str();
    out += '>';
  }
  return out;
}

// Characters emitted verbatim in resource local names.
bool is_local_name_safe(unsigned char c) {
  if (std::isalnum(c)) return true;
  switch (c) {
    case '-':
    case '.':
    case '_':
    case '~':
    case '/':
    case ':':
    case '(':
    case ')':
    case ',':
    case '!':
    case '*':
    case '\'':
      return true;
    default:
      return false;
  }
}

bool has_valid_escapes_only(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size() || !std::isxdigit(static_cast<unsigned char>(s[i + 1])) ||
          !std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) throw InvalidIri(value_);
}

bool Iri::is_valid(std::string_view value) {
  const std::size_t colon = value.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(value[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    const auto c = static_cast<unsigned char>(value[i]);
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  for (char c : value) {
    if (is_forbidden_iri_char(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Iri vocab::xsd(std::string_view local) { return Iri(std::string(kXsd) + std::string(local)); }

Literal Literal::typed(std::string lexical, Iri datatype) {
  Literal lit(std::move(lexical));
  lit.datatype_ = std::move(datatype);
  return lit;
}

Literal Literal::tagged(std::string lexical, std::string language) {
  if (!is_language_tag(language)) throw Error("invalid language tag: " + language);
  Literal lit(std::move(lexical));
  lit.language_ = std::move(language);
  return lit;
}

std::string to_ntriples(const Iri& iri) { return "<" + iri.str() + ">"; }

std::string to_ntriples(const Term& term) {
  if (const Iri* iri = as_iri(term)) return to_ntriples(*iri);
  return literal_rendering(std::get<Literal>(term));
}

std::weak_ordering compare_terms(const Term& a, const Term& b) {
  const Iri* ia = as_iri(a);
  const Iri* ib = as_iri(b);
  if (ia && ib) return compare_iri_rendering(ia->str(), ib->str());
  // '"' sorts before '<'.
  if (ia) return std::weak_ordering::greater;
  if (ib) return std::weak_ordering::less;
  return literal_rendering(std::get<Literal>(a)) <=> literal_rendering(std::get<Literal>(b));
}

bool operator<(const Triple& a, const Triple& b) {
  if (auto c = compare_iri_rendering(a.subject.str(), b.subject.str()); c != 0) return c < 0;
  if (auto c = compare_iri_rendering(a.predicate.str(), b.predicate.str()); c != 0) return c < 0;
  return compare_terms(a.object, b.object) < 0;
}

Graph::Graph(std::initializer_list<Triple> triples) : triples_(triples) {}

void Graph::merge(const Graph& other) { triples_.insert(other.begin(), other.end()); }

void NamespaceConfig::validate() const {
  for (const Iri* base : {&resource_base, &ontology_base}) {
    const std::string& v = base->str();
    if (v.back() != '/' && v.back() != '#') throw InvalidIri(v + " (namespace must end in '/' or '#')");
  }
  if (!is_language_tag(label_language)) throw Error("invalid label language: " + label_language);
}

std::string normalize_title(std::string_view title) {
  std::string decoded =
      has_valid_escapes_only(title) ? text::sanitize_utf8(text::percent_decode(title)) : text::sanitize_utf8(title);
  for (char& c : decoded) {
    if (c == '_') c = ' ';
  }
  return text::upper_first(text::collapse_whitespace(decoded));
}

std::string encode_local_name(std::string_view title) {
  const std::string normalized = normalize_title(title);
  if (normalized.empty()) throw EmptyTitle();
  std::string out;
  out.reserve(normalized.size());
  for (char c : normalized) {
    const auto u = static_cast<unsigned char>(c);
    if (c == ' ') {
      out += '_';
    } else if (is_local_name_safe(u)) {
      out += c;
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", static_cast<unsigned>(u));
      out += buf;
    }
  }
  return out;
}

Iri title_to_iri(std::string_view title, const NamespaceConfig& ns) {
  return Iri(ns.resource_base.str() + encode_local_name(title));
}

std::string iri_to_title(const Iri& iri, const NamespaceConfig& ns) {
  const std::string& base = ns.resource_base.str();
  if (!iri.starts_with(base)) throw ForeignIri(iri.str());
  std::string title = text::sanitize_utf8(text::percent_decode(std::string_view(iri.str()).substr(base.size())));
  for (char& c : title) {
    if (c == '_') c = ' ';
  }
  return title;
}

std::string serialize_ntriples(const Graph& g) {
  std::string out;
  for (const Triple& t : g) {
    out += to_ntriples(t.subject);
    out += ' ';
    out += to_ntriples(t.predicate);
    out += ' ';
    out += to_ntriples(t.object);
    out += " .\n";
  }
  return out;
}

}  // namespace kgod
