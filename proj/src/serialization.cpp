// N-Triples and Turtle readers/writers.

#include <cctype>
#include <map>
#include <vector>

#include "kgod/error.hpp"
#include "kgod/rdf.hpp"
#include "kgod/text.hpp"

namespace kgod {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Cursor over a document with line tracking shared by both readers.
class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
  bool looking_at(std::string_view lit) const { return s_.substr(pos_).starts_with(lit); }
  char get() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && !done(); ++i) get();
  }
  std::size_t line() const { return line_; }

  [[noreturn]] void fail(const std::string& reason) const { throw SyntaxError(line_, reason); }

  void expect(char c) {
    if (peek() != c || done()) fail(std::string("expected '") + c + "'");
    get();
  }

  // Skips spaces and tabs (and newlines/comments when multiline).
  void skip_space(bool multiline) {
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        get();
      } else if (multiline && c == '\n') {
        get();
      } else if (multiline && c == '#') {
        while (!done() && peek() != '\n') get();
      } else {
        break;
      }
    }
  }

  std::string read_iriref() {
    expect('<');
    std::string value;
    while (true) {
      if (done() || peek() == '\n') fail("unterminated IRI");
      const char c = get();
      if (c == '>') break;
      if (c == '\\') {
        append_uchar(value);
        continue;
      }
      value += c;
    }
    if (!Iri::is_valid(value)) fail("invalid IRI <" + value + ">");
    return value;
  }

  // Reads a quoted string body; the opening quote has been consumed.
  std::string read_string_body(char quote, bool long_form) {
    std::string value;
    while (true) {
      if (done()) fail("unterminated string literal");
      if (long_form) {
        if (peek() == quote && peek(1) == quote && peek(2) == quote) {
          advance(3);
          // A long string may end with extra quotes that belong to the content.
          while (peek() == quote) value += get();
          return value;
        }
      } else if (peek() == quote) {
        get();
        return value;
      } else if (peek() == '\n' || peek() == '\r') {
        fail("newline in string literal");
      }
      const char c = get();
      if (c != '\\') {
        value += c;
        continue;
      }
      if (done()) fail("dangling escape");
      switch (peek()) {
        case 't': value += '\t'; get(); break;
        case 'b': value += '\b'; get(); break;
        case 'n': value += '\n'; get(); break;
        case 'r': value += '\r'; get(); break;
        case 'f': value += '\f'; get(); break;
        case '"': value += '"'; get(); break;
        case '\'': value += '\''; get(); break;
        case '\\': value += '\\'; get(); break;
        case 'u':
        case 'U': append_uchar(value); break;
        default: fail(std::string("invalid escape \\") + peek());
      }
    }
  }

  std::string read_language() {
    std::string tag;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) tag += get();
    if (tag.empty()) fail("empty language tag");
    return tag;
  }

 private:
  // Reads `uXXXX` or `UXXXXXXXX` after a backslash.
  void append_uchar(std::string& out) {
    const char kind = done() ? '\0' : get();
    std::size_t digits = 0;
    if (kind == 'u') {
      digits = 4;
    } else if (kind == 'U') {
      digits = 8;
    } else {
      fail("invalid escape in IRI");
    }
    char32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const int h = done() ? -1 : hex_digit(get());
      if (h < 0) fail("bad unicode escape");
      cp = cp * 16 + static_cast<char32_t>(h);
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("unicode escape out of range");
    text::append_utf8(out, cp);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string read_prefixed_name(Cursor& c, const std::map<std::string, std::string>& prefixes);

Literal make_literal(Cursor& c, std::string lexical, const std::map<std::string, std::string>* prefixes) {
  if (c.peek() == '@') {
    c.get();
    return Literal::tagged(std::move(lexical), c.read_language());
  }
  if (c.peek() == '^' && c.peek(1) == '^') {
    c.advance(2);
    if (c.peek() == '<') return Literal::typed(std::move(lexical), Iri(c.read_iriref()));
    if (prefixes == nullptr) c.fail("expected datatype IRI");
    return Literal::typed(std::move(lexical), Iri(read_prefixed_name(c, *prefixes)));
  }
  return Literal(std::move(lexical));
}

bool is_pn_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '-' || c == '.' || u >= 0x80;
}

std::string read_prefixed_name(Cursor& c, const std::map<std::string, std::string>& prefixes) {
  std::string prefix;
  while (!c.done() && c.peek() != ':' && is_pn_char(c.peek())) prefix += c.get();
  if (c.peek() != ':') c.fail("expected prefixed name");
  c.get();
  const auto it = prefixes.find(prefix);
  if (it == prefixes.end()) c.fail("undeclared prefix '" + prefix + ":'");
  std::string local;
  while (!c.done()) {
    const char ch = c.peek();
    if (ch == '\\') {
      c.get();
      if (c.done()) c.fail("dangling escape in local name");
      local += c.get();
    } else if (ch == '.') {
      // A '.' not followed by a name character terminates the statement.
      const char next = c.peek(1);
      if (!(is_pn_char(next) || next == ':' || next == '%')) break;
      local += c.get();
    } else if (is_pn_char(ch) || ch == ':' || ch == '%') {
      local += c.get();
    } else {
      break;
    }
  }
  std::string iri = it->second + local;
  if (!Iri::is_valid(iri)) c.fail("invalid IRI " + iri);
  return iri;
}

// Turtle prefixed-name local part we are willing to emit unescaped.
bool is_plain_local(std::string_view local) {
  if (local.empty()) return false;
  for (char c : local) {
    const auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_' && c != '-' && c != '.') return false;
  }
  return local.front() != '.' && local.front() != '-' && local.back() != '.';
}

struct PrefixTable {
  std::vector<std::pair<std::string, std::string>> entries;  // prefix, namespace

  std::string render(const Iri& iri) const {
    for (const auto& [prefix, ns] : entries) {
      if (iri.starts_with(ns) && is_plain_local(std::string_view(iri.str()).substr(ns.size()))) {
        return prefix + ":" + iri.str().substr(ns.size());
      }
    }
    return to_ntriples(iri);
  }
};

std::string render_object(const Term& term, const PrefixTable& prefixes) {
  if (const Iri* iri = as_iri(term)) return prefixes.render(*iri);
  const Literal& lit = std::get<Literal>(term);
  if (!lit.datatype()) return to_ntriples(term);
  // Render the quoted part via N-Triples, then a (possibly prefixed) datatype.
  const std::string quoted = to_ntriples(Term(Literal(lit.lexical())));
  return quoted + "^^" + prefixes.render(*lit.datatype());
}

}  // namespace

Graph parse_ntriples(std::string_view bytes) {
  Graph g;
  Cursor c(bytes);
  while (!c.done()) {
    c.skip_space(false);
    if (c.done()) break;
    if (c.peek() == '\n') {
      c.get();
      continue;
    }
    if (c.peek() == '#') {
      while (!c.done() && c.peek() != '\n') c.get();
      continue;
    }
    if (c.peek() == '_') c.fail("blank nodes are not supported");
    Iri subject(c.read_iriref());
    c.skip_space(false);
    Iri predicate(c.read_iriref());
    c.skip_space(false);
    std::optional<Term> object;
    if (c.peek() == '<') {
      object = Iri(c.read_iriref());
    } else if (c.peek() == '"') {
      c.get();
      std::string lexical = c.read_string_body('"', false);
      object = make_literal(c, std::move(lexical), nullptr);
    } else if (c.peek() == '_') {
      c.fail("blank nodes are not supported");
    } else {
      c.fail("expected object");
    }
    c.skip_space(false);
    if (c.peek() != '.' || c.done()) c.fail("expected '.' at end of triple");
    c.get();
    c.skip_space(false);
    if (c.peek() == '#') {
      while (!c.done() && c.peek() != '\n') c.get();
    }
    if (!c.done() && c.peek() != '\n') c.fail("trailing content after triple");
    g.insert(Triple{std::move(subject), std::move(predicate), std::move(*object)});
  }
  return g;
}

std::string serialize_turtle(const Graph& g, const NamespaceConfig& ns) {
  PrefixTable prefixes;
  prefixes.entries.emplace_back("dbr", ns.resource_base.str());
  if (ns.ontology_base != ns.resource_base) prefixes.entries.emplace_back("dbo", ns.ontology_base.str());
  prefixes.entries.emplace_back("rdf", std::string(vocab::kRdf));
  prefixes.entries.emplace_back("rdfs", std::string(vocab::kRdfs));
  prefixes.entries.emplace_back("xsd", std::string(vocab::kXsd));

  std::string out;
  for (const auto& [prefix, iri] : prefixes.entries) {
    out += "@prefix " + prefix + ": <" + iri + "> .\n";
  }
  const Iri rdf_type(std::string(vocab::kRdf) + "type");

  const Iri* subject = nullptr;
  const Iri* predicate = nullptr;
  for (const Triple& t : g) {
    if (subject == nullptr || *subject != t.subject) {
      if (subject != nullptr) out += " .\n";
      out += "\n" + prefixes.render(t.subject) + " ";
      subject = &t.subject;
      predicate = nullptr;
    }
    if (predicate == nullptr || *predicate != t.predicate) {
      if (predicate != nullptr) out += " ;\n    ";
      out += t.predicate == rdf_type ? std::string("a") : prefixes.render(t.predicate);
      out += " ";
      predicate = &t.predicate;
    } else {
      out += " , ";
    }
    out += render_object(t.object, prefixes);
  }
  if (subject != nullptr) out += " .\n";
  return out;
}

Graph parse_turtle(std::string_view bytes) {
  Graph g;
  Cursor c(bytes);
  std::map<std::string, std::string> prefixes;

  auto read_iri_like = [&]() -> Iri {
    if (c.peek() == '<') return Iri(c.read_iriref());
    return Iri(read_prefixed_name(c, prefixes));
  };

  while (true) {
    c.skip_space(true);
    if (c.done()) break;
    const bool at_prefix = c.looking_at("@prefix");
    const bool sparql_prefix = !at_prefix && (c.looking_at("PREFIX") || c.looking_at("prefix"));
    if (at_prefix || sparql_prefix) {
      c.advance(at_prefix ? 7 : 6);
      c.skip_space(true);
      std::string prefix;
      while (!c.done() && c.peek() != ':') prefix += c.get();
      c.expect(':');
      c.skip_space(true);
      prefixes[prefix] = c.read_iriref();
      c.skip_space(true);
      if (at_prefix) c.expect('.');
      continue;
    }
    if (c.peek() == '_' || c.peek() == '[') c.fail("blank nodes are not supported");
    const Iri subject = read_iri_like();
    while (true) {
      c.skip_space(true);
      Iri predicate = (c.peek() == 'a' && (c.peek(1) == ' ' || c.peek(1) == '\t' || c.peek(1) == '\n'))
                          ? (c.get(), Iri(std::string(vocab::kRdf) + "type"))
                          : read_iri_like();
      while (true) {
        c.skip_space(true);
        Term object = [&]() -> Term {
          const char ch = c.peek();
          if (ch == '"' || ch == '\'') {
            const bool long_form = c.peek(1) == ch && c.peek(2) == ch;
            c.advance(long_form ? 3 : 1);
            std::string lexical = c.read_string_body(ch, long_form);
            return make_literal(c, std::move(lexical), &prefixes);
          }
          if (ch == '+' || ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) {
            std::string num;
            while (!c.done() && (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '+' ||
                                 c.peek() == '-' || c.peek() == 'e' || c.peek() == 'E' ||
                                 (c.peek() == '.' && std::isdigit(static_cast<unsigned char>(c.peek(1)))))) {
              num += c.get();
            }
            const bool is_double = num.find_first_of("eE") != std::string::npos;
            const bool is_decimal = !is_double && num.find('.') != std::string::npos;
            return Literal::typed(num, vocab::xsd(is_double ? "double" : is_decimal ? "decimal" : "integer"));
          }
          if (c.looking_at("true") || c.looking_at("false")) {
            const bool v = c.looking_at("true");
            c.advance(v ? 4 : 5);
            return Literal::typed(v ? "true" : "false", vocab::xsd("boolean"));
          }
          if (ch == '_' || ch == '[' || ch == '(') c.fail("blank nodes and collections are not supported");
          return read_iri_like();
        }();
        g.insert(Triple{subject, predicate, std::move(object)});
        c.skip_space(true);
        if (c.peek() == ',') {
          c.get();
          continue;
        }
        break;
      }
      if (c.peek() == ';') {
        c.get();
        c.skip_space(true);
        // Trailing ';' before '.' is allowed.
        if (c.peek() == '.') break;
        continue;
      }
      break;
    }
    c.skip_space(true);
    c.expect('.');
  }
  return g;
}

}  // namespace kgod
