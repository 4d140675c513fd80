#include "kgod/mappings.hpp"

#include <cstdint>
#include <cstdio>
#include <regex>

#include "kgod/text.hpp"

namespace kgod {

namespace {

using wikitext::Fragment;
using wikitext::NestedTemplate;
using wikitext::ParamValue;
using wikitext::WikiLink;

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Token {
  enum Kind { Word, Quoted, Angle, Arrow } kind;
  std::string value;
};

class LineReader {
 public:
  LineReader(std::string_view line, std::size_t number) : line_(line), number_(number) {}

  std::vector<Token> tokens() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line_.size()) {
      const char c = line_[i];
      if (text::is_space(c)) {
        ++i;
      } else if (c == '#') {
        break;
      } else if (c == '"') {
        const std::size_t end = line_.find('"', i + 1);
        if (end == std::string_view::npos) fail("unterminated string");
        out.push_back({Token::Quoted, std::string(line_.substr(i + 1, end - i - 1))});
        i = end + 1;
      } else if (c == '<') {
        const std::size_t end = line_.find('>', i + 1);
        if (end == std::string_view::npos) fail("unterminated IRI");
        out.push_back({Token::Angle, std::string(line_.substr(i + 1, end - i - 1))});
        i = end + 1;
      } else if (line_.substr(i).starts_with("->")) {
        out.push_back({Token::Arrow, "->"});
        i += 2;
      } else {
        std::size_t end = i;
        while (end < line_.size() && !text::is_space(line_[end]) && line_[end] != '#' && line_[end] != '"' &&
               line_[end] != '<' && !line_.substr(end).starts_with("->")) {
          ++end;
        }
        out.push_back({Token::Word, std::string(line_.substr(i, end - i))});
        i = end;
      }
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& reason) const { throw FormatError(number_, reason); }

 private:
  std::string_view line_;
  std::size_t number_;
};

Iri resolve_iri(const Token& t, const NamespaceConfig& ns, const LineReader& r) {
  std::string full;
  if (t.kind == Token::Angle) {
    full = t.value;
  } else if (t.kind == Token::Word) {
    const std::size_t colon = t.value.find(':');
    if (colon == std::string::npos) r.fail("expected prefixed name or <IRI>, got " + t.value);
    const std::string_view prefix = std::string_view(t.value).substr(0, colon);
    const std::string local = t.value.substr(colon + 1);
    if (prefix == "dbo") {
      full = ns.ontology_base.str() + local;
    } else if (prefix == "dbr") {
      full = ns.resource_base.str() + local;
    } else if (prefix == "rdf") {
      full = std::string(vocab::kRdf) + local;
    } else if (prefix == "rdfs") {
      full = std::string(vocab::kRdfs) + local;
    } else if (prefix == "xsd") {
      full = std::string(vocab::kXsd) + local;
    } else {
      r.fail("unknown prefix " + std::string(prefix));
    }
  } else {
    r.fail("expected IRI");
  }
  if (!Iri::is_valid(full)) r.fail("invalid IRI " + full);
  return Iri(full);
}

RangeKind parse_range(const std::string& word) {
  if (word == "object") return range::ObjectResource{};
  if (word == "integer") return range::Integer{};
  if (word == "double") return range::Double{};
  if (word == "date") return range::Date{};
  if (word.starts_with("string@") && word.size() > 7) return range::PlainString{word.substr(7)};
  throw UnknownRange(word);
}

void collect_links(const ParamValue& value, std::vector<const WikiLink*>& out) {
  for (const Fragment& f : value.fragments) {
    if (const auto* link = std::get_if<WikiLink>(&f)) {
      if (!link->is_non_article()) out.push_back(link);
    } else if (const auto* nested = std::get_if<NestedTemplate>(&f)) {
      for (const auto& [key, v] : (*nested)->params) collect_links(v, out);
    }
  }
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : kDays[month - 1];
}

std::string coerce_date(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dash = s.find('-', start);
    parts.push_back(s.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start));
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  if (parts.size() > 3 || parts[0].size() != 4 || !all_digits(parts[0])) return {};
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].empty() || parts[i].size() > 2 || !all_digits(parts[i])) return {};
  }
  const int year = std::stoi(std::string(parts[0]));
  const int month = parts.size() > 1 ? std::stoi(std::string(parts[1])) : 1;
  const int day = parts.size() > 2 ? std::stoi(std::string(parts[2])) : 1;
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return {};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

}  // namespace

std::string range_keyword(const RangeKind& r) {
  return std::visit(Overload{[](const range::ObjectResource&) -> std::string { return "object"; },
                             [](const range::PlainString& p) -> std::string { return "string@" + p.language; },
                             [](const range::Integer&) -> std::string { return "integer"; },
                             [](const range::Double&) -> std::string { return "double"; },
                             [](const range::Date&) -> std::string { return "date"; }},
                    r);
}

const TemplateMapping* MappingSet::find(std::string_view template_name) const {
  auto it = by_template.find(std::string(template_name));
  return it == by_template.end() ? nullptr : &it->second;
}

MappingSet load_mappings(std::string_view bytes, const NamespaceConfig& ns) {
  MappingSet ms;
  ms.version = fnv1a_hex(bytes);
  ms.loaded_at = std::chrono::system_clock::now();

  TemplateMapping* current = nullptr;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    if (line.ends_with('\r')) line.remove_suffix(1);
    pos = end + 1;
    ++number;

    LineReader reader(line, number);
    const std::vector<Token> toks = reader.tokens();
    if (toks.empty()) continue;

    if (toks[0].kind == Token::Word && toks[0].value == "template") {
      if (toks.size() != 5 || toks[1].kind != Token::Quoted || toks[2].kind != Token::Arrow ||
          toks[3].kind != Token::Word || toks[3].value != "class") {
        reader.fail("expected: template \"Name\" -> class IRI");
      }
      const std::string name = wikitext::normalize_name(toks[1].value);
      if (name.empty()) reader.fail("empty template name");
      if (ms.by_template.count(name)) throw DuplicateTemplate(name);
      TemplateMapping tm{name, resolve_iri(toks[4], ns, reader), {}};
      current = &ms.by_template.emplace(name, std::move(tm)).first->second;
      continue;
    }

    if (toks.size() != 4 || toks[0].kind != Token::Word || toks[1].kind != Token::Arrow ||
        toks[3].kind != Token::Word) {
      reader.fail("expected: param -> predicate range");
    }
    if (!current) reader.fail("property mapping outside a template block");
    const std::string& param = toks[0].value;
    for (const PropertyMapping& p : current->properties) {
      if (p.param == param) reader.fail("duplicate parameter " + param);
    }
    Iri predicate = resolve_iri(toks[2], ns, reader);
    current->properties.push_back({param, std::move(predicate), parse_range(toks[3].value)});
  }
  return ms;
}

Literal coerce_literal(std::string_view raw, const RangeKind& r) {
  const std::string_view s = text::trim(raw);
  const std::string input(raw);
  return std::visit(
      Overload{
          [&](const range::ObjectResource&) -> Literal { throw CoercionError(input, r); },
          [&](const range::PlainString& p) -> Literal {
            const std::string v = text::collapse_whitespace(s);
            if (v.empty()) throw CoercionError(input, r);
            return Literal::tagged(v, p.language);
          },
          [&](const range::Integer&) -> Literal {
            std::string v(s);
            std::erase(v, ',');
            std::string_view digits = v;
            std::string sign;
            if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
              if (digits[0] == '-') sign = "-";
              digits.remove_prefix(1);
            }
            if (!all_digits(digits) || s.starts_with(',') || s.ends_with(',')) throw CoercionError(input, r);
            return Literal::typed(sign + std::string(digits), vocab::xsd("integer"));
          },
          [&](const range::Double&) -> Literal {
            static const std::regex kDouble(R"([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)");
            if (!std::regex_match(s.begin(), s.end(), kDouble)) throw CoercionError(input, r);
            return Literal::typed(std::string(s), vocab::xsd("double"));
          },
          [&](const range::Date&) -> Literal {
            std::string v = coerce_date(s);
            if (v.empty()) throw CoercionError(input, r);
            return Literal::typed(std::move(v), vocab::xsd("date"));
          }},
      r);
}

Graph apply_mappings(const wikitext::ParsedPage& page, const Iri& subject, const MappingSet& ms,
                     const NamespaceConfig& ns, std::vector<CoercionWarning>* warnings) {
  Graph g;
  auto warn = [&](const std::string& param, const std::string& reason) {
    if (warnings) warnings->push_back({page.title, param, reason});
  };

  for (const wikitext::TemplateCall& call : page.templates) {
    const TemplateMapping* tm = ms.find(call.name);
    if (!tm) continue;
    g.insert({subject, ns.type_predicate, tm->class_iri});
    for (const PropertyMapping& pm : tm->properties) {
      const ParamValue* value = call.param(pm.param);
      if (!value) continue;
      if (std::holds_alternative<range::ObjectResource>(pm.range)) {
        std::vector<const WikiLink*> links;
        collect_links(*value, links);
        for (const WikiLink* link : links) {
          try {
            g.insert({subject, pm.predicate, title_to_iri(link->target, ns)});
          } catch (const Error& e) {
            warn(pm.param, e.what());
          }
        }
        continue;
      }
      const std::string plain = wikitext::plain_text(*value);
      if (plain.empty()) continue;
      try {
        g.insert({subject, pm.predicate, coerce_literal(plain, pm.range)});
      } catch (const Error& e) {
        warn(pm.param, e.what());
      }
    }
  }

  if (!text::trim(page.title).empty()) {
    g.insert({subject, ns.label_predicate, Literal::tagged(normalize_title(page.title), ns.label_language)});
  }
  return g;
}

}  // namespace kgod
