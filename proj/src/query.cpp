#include "kgod/query.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "kgod/text.hpp"

namespace kgod {

namespace {

bool is_name_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}
bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '-'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

const std::set<std::string> kUnsupportedKeywords{
    "OPTIONAL", "FILTER", "UNION",  "MINUS",  "BIND",     "VALUES",   "GRAPH",     "SERVICE", "ORDER",
    "GROUP",    "HAVING", "LIMIT",  "OFFSET", "ASK",      "CONSTRUCT", "DESCRIBE", "BASE",    "FROM",
    "NOT",      "EXISTS", "INSERT", "DELETE", "REDUCED"};

class QueryParser {
 public:
  QueryParser(std::string_view text, const NamespaceConfig& ns) : s_(text) {
    prefixes_["dbr"] = ns.resource_base.str();
    prefixes_["dbo"] = ns.ontology_base.str();
    prefixes_["rdf"] = std::string(vocab::kRdf);
    prefixes_["rdfs"] = std::string(vocab::kRdfs);
    prefixes_["xsd"] = std::string(vocab::kXsd);
  }

  QueryAst parse() {
    QueryAst ast;
    skip_ws();
    while (peek_keyword("PREFIX")) {
      take_keyword("PREFIX");
      skip_ws();
      const std::size_t at = i_;
      std::string prefix;
      while (i_ < s_.size() && s_[i_] != ':' && is_name_char(s_[i_])) prefix += s_[i_++];
      if (!take(':')) throw ParseError(at, "prefix name followed by ':'");
      skip_ws();
      prefixes_[prefix] = read_iriref();
      skip_ws();
    }
    if (!peek_keyword("SELECT")) {
      reject_unsupported_word();
      throw ParseError(i_, "SELECT");
    }
    take_keyword("SELECT");
    skip_ws();
    if (peek_keyword("DISTINCT")) {
      take_keyword("DISTINCT");
      skip_ws();
    }
    if (take('*')) {
      ast.select_vars = std::nullopt;
    } else {
      std::vector<std::string> vars;
      while (i_ < s_.size() && (s_[i_] == '?' || s_[i_] == '$')) {
        vars.push_back(read_var());
        skip_ws();
      }
      if (vars.empty()) {
        if (i_ < s_.size() && s_[i_] == '(') throw UnsupportedSyntax("projection expression");
        reject_unsupported_word();
        throw ParseError(i_, "variable or '*'");
      }
      ast.select_vars = std::move(vars);
    }
    skip_ws();
    if (peek_keyword("FROM")) throw UnsupportedSyntax("FROM");
    if (peek_keyword("WHERE")) {
      take_keyword("WHERE");
      skip_ws();
    }
    if (!take('{')) throw ParseError(i_, "'{'");
    parse_group(ast.patterns);
    skip_ws();
    if (i_ < s_.size()) {
      reject_unsupported_word();
      throw ParseError(i_, "end of query");
    }
    if (ast.patterns.empty()) throw ParseError(i_, "at least one triple pattern");
    if (ast.select_vars) {
      std::set<std::string> used;
      for (const TriplePattern& p : ast.patterns) {
        for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object}) {
          if (const auto* v = std::get_if<Var>(t)) used.insert(v->name);
        }
      }
      for (const std::string& v : *ast.select_vars) {
        if (!used.count(v)) throw ParseError(0, "selected variable ?" + v + " to occur in a pattern");
      }
    }
    return ast;
  }

 private:
  void parse_group(std::vector<TriplePattern>& out) {
    while (true) {
      skip_ws();
      if (i_ >= s_.size()) throw ParseError(i_, "'}'");
      if (take('}')) return;
      if (s_[i_] == '{') throw UnsupportedSyntax("nested group");
      if (s_[i_] == '[' || s_.substr(i_).starts_with("_:")) throw UnsupportedSyntax("blank node");
      reject_unsupported_word();

      const std::size_t subject_at = i_;
      PatternTerm subject = read_term();
      if (std::holds_alternative<Literal>(subject)) throw ParseError(subject_at, "IRI or variable as subject");
      // predicate-object lists: p o (, o)* (; p o (, o)*)*
      while (true) {
        skip_ws();
        if (i_ < s_.size() && s_[i_] == '^') throw UnsupportedSyntax("property path");
        const std::size_t predicate_at = i_;
        PatternTerm predicate = read_predicate();
        skip_ws();
        if (i_ < s_.size() && std::string_view("/|*+").find(s_[i_]) != std::string_view::npos) {
          throw UnsupportedSyntax("property path");
        }
        if (std::holds_alternative<Literal>(predicate)) throw ParseError(predicate_at, "IRI or variable as predicate");
        while (true) {
          skip_ws();
          if (i_ < s_.size() && (s_[i_] == '[' || s_[i_] == '(')) throw UnsupportedSyntax("blank node or collection");
          PatternTerm object = read_term();
          out.push_back({subject, predicate, std::move(object)});
          skip_ws();
          if (!take(',')) break;
        }
        if (!take(';')) break;
        skip_ws();
        // A trailing ';' before '.' or '}' is allowed.
        if (i_ < s_.size() && (s_[i_] == '.' || s_[i_] == '}')) break;
      }
      skip_ws();
      if (take('.')) continue;
      skip_ws();
      if (i_ < s_.size() && s_[i_] == '}') continue;
      reject_unsupported_word();
      throw ParseError(i_, "'.' or '}'");
    }
  }

  PatternTerm read_predicate() {
    if (i_ < s_.size() && s_[i_] == 'a' && (i_ + 1 >= s_.size() || !is_name_char(s_[i_ + 1])) &&
        (i_ + 1 >= s_.size() || s_[i_ + 1] != ':')) {
      ++i_;
      return Iri(std::string(vocab::kRdf) + "type");
    }
    return read_term();
  }

  PatternTerm read_term() {
    skip_ws();
    if (i_ >= s_.size()) throw ParseError(i_, "term");
    const char c = s_[i_];
    if (c == '?' || c == '$') return Var{read_var()};
    if (c == '<') {
      const std::size_t at = i_;
      std::string iri = read_iriref();
      if (!Iri::is_valid(iri)) throw ParseError(at, "absolute IRI");
      return Iri(std::move(iri));
    }
    if (c == '"' || c == '\'') return read_literal();
    if (is_digit(c) || ((c == '+' || c == '-' || c == '.') && i_ + 1 < s_.size() && is_digit(s_[i_ + 1]))) {
      return read_number();
    }
    if (peek_keyword("true") || peek_keyword("false")) {
      const bool v = peek_keyword("true");
      i_ += v ? 4 : 5;
      return Literal::typed(v ? "true" : "false", vocab::xsd("boolean"));
    }
    if (is_name_start(c) || c == ':') return read_prefixed_name();
    throw ParseError(i_, "term");
  }

  std::string read_var() {
    const std::size_t at = i_;
    ++i_;  // '?' or '$'
    std::string name;
    while (i_ < s_.size() && (is_name_char(s_[i_]))) name += s_[i_++];
    if (name.empty()) throw ParseError(at, "variable name");
    return name;
  }

  std::string read_iriref() {
    const std::size_t at = i_;
    if (!take('<')) throw ParseError(i_, "'<'");
    const std::size_t end = s_.find('>', i_);
    if (end == std::string_view::npos) throw ParseError(at, "'>'");
    std::string iri(s_.substr(i_, end - i_));
    i_ = end + 1;
    return iri;
  }

  Iri read_prefixed_name() {
    const std::size_t at = i_;
    std::string prefix;
    while (i_ < s_.size() && s_[i_] != ':' && is_name_char(s_[i_])) prefix += s_[i_++];
    if (!take(':')) {
      reject_word(prefix);
      throw ParseError(at, "prefixed name");
    }
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) throw ParseError(at, "declared prefix, got '" + prefix + ":'");
    std::string local;
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == '\\' && i_ + 1 < s_.size()) {
        local += s_[i_ + 1];
        i_ += 2;
      } else if (c == '%' && i_ + 2 < s_.size()) {
        local += s_.substr(i_, 3);
        i_ += 3;
      } else if (c == '.') {
        // A dot ends the name unless a name character follows.
        if (i_ + 1 < s_.size() && (is_name_char(s_[i_ + 1]) || s_[i_ + 1] == ':')) {
          local += c;
          ++i_;
        } else {
          break;
        }
      } else if (is_name_char(c) || c == ':') {
        local += c;
        ++i_;
      } else {
        break;
      }
    }
    std::string full = it->second + local;
    if (!Iri::is_valid(full)) throw ParseError(at, "valid IRI from prefixed name");
    return Iri(std::move(full));
  }

  Literal read_literal() {
    const std::size_t at = i_;
    const char q = s_[i_];
    const bool long_form = s_.substr(i_).starts_with(std::string(3, q));
    i_ += long_form ? 3 : 1;
    std::string value;
    while (true) {
      if (i_ >= s_.size()) throw ParseError(at, "closing quote");
      const char c = s_[i_];
      if (long_form ? s_.substr(i_).starts_with(std::string(3, q)) : c == q) {
        i_ += long_form ? 3 : 1;
        break;
      }
      if (!long_form && (c == '\n' || c == '\r')) throw ParseError(i_, "closing quote");
      if (c == '\\') {
        if (i_ + 1 >= s_.size()) throw ParseError(i_, "escape");
        const char e = s_[i_ + 1];
        i_ += 2;
        switch (e) {
          case 't': value += '\t'; break;
          case 'n': value += '\n'; break;
          case 'r': value += '\r'; break;
          case 'b': value += '\b'; break;
          case 'f': value += '\f'; break;
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\\': value += '\\'; break;
          case 'u':
          case 'U': {
            const std::size_t n = e == 'u' ? 4 : 8;
            if (i_ + n > s_.size()) throw ParseError(i_, "hex digits");
            char32_t cp = 0;
            for (std::size_t k = 0; k < n; ++k) {
              const char h = s_[i_ + k];
              int d = is_digit(h) ? h - '0' : (h >= 'a' && h <= 'f') ? h - 'a' + 10 : (h >= 'A' && h <= 'F') ? h - 'A' + 10 : -1;
              if (d < 0) throw ParseError(i_ + k, "hex digit");
              cp = cp * 16 + static_cast<char32_t>(d);
            }
            i_ += n;
            text::append_utf8(value, cp);
            break;
          }
          default:
            throw ParseError(i_ - 1, "valid escape");
        }
        continue;
      }
      value += c;
      ++i_;
    }
    if (take('@')) {
      std::string lang;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '-')) lang += s_[i_++];
      try {
        return Literal::tagged(std::move(value), std::move(lang));
      } catch (const Error&) {
        throw ParseError(at, "language tag");
      }
    }
    if (s_.substr(i_).starts_with("^^")) {
      i_ += 2;
      if (i_ < s_.size() && s_[i_] == '<') {
        const std::size_t iri_at = i_;
        std::string dt = read_iriref();
        if (!Iri::is_valid(dt)) throw ParseError(iri_at, "datatype IRI");
        return Literal::typed(std::move(value), Iri(std::move(dt)));
      }
      return Literal::typed(std::move(value), read_prefixed_name());
    }
    return Literal(std::move(value));
  }

  Literal read_number() {
    const std::size_t start = i_;
    if (s_[i_] == '+' || s_[i_] == '-') ++i_;
    while (i_ < s_.size() && is_digit(s_[i_])) ++i_;
    bool decimal = false, exponent = false;
    if (i_ + 1 < s_.size() && s_[i_] == '.' && is_digit(s_[i_ + 1])) {
      decimal = true;
      ++i_;
      while (i_ < s_.size() && is_digit(s_[i_])) ++i_;
    }
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
      if (j < s_.size() && is_digit(s_[j])) {
        exponent = true;
        i_ = j;
        while (i_ < s_.size() && is_digit(s_[i_])) ++i_;
      }
    }
    const char* type = exponent ? "double" : decimal ? "decimal" : "integer";
    return Literal::typed(std::string(s_.substr(start, i_ - start)), vocab::xsd(type));
  }

  void reject_word(const std::string& word) {
    std::string upper;
    for (char c : word) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (kUnsupportedKeywords.count(upper)) throw UnsupportedSyntax(upper);
  }

  void reject_unsupported_word() {
    std::size_t j = i_;
    std::string word;
    while (j < s_.size() && std::isalpha(static_cast<unsigned char>(s_[j]))) word += s_[j++];
    if (!word.empty() && (j >= s_.size() || s_[j] != ':')) reject_word(word);
  }

  bool peek_keyword(std::string_view kw) const {
    if (!text::istarts_with(s_.substr(i_), kw)) return false;
    const std::size_t after = i_ + kw.size();
    return after >= s_.size() || !(is_name_char(s_[after]) || s_[after] == ':');
  }

  void take_keyword(std::string_view kw) { i_ += kw.size(); }

  bool take(char c) {
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (i_ < s_.size()) {
      if (text::is_space(s_[i_])) {
        ++i_;
      } else if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::map<std::string, std::string> prefixes_;
};

bool is_resource(const PatternTerm& t, const NamespaceConfig& ns) {
  const Iri* iri = std::get_if<Iri>(&t);
  return iri && iri->starts_with(ns.resource_base.str()) && iri->str().size() > ns.resource_base.str().size();
}

using Row = std::map<std::string, Term>;

// Binds pattern against one triple; false when they do not match.
bool match_term(const PatternTerm& p, const Term& value, Row& row) {
  if (const auto* v = std::get_if<Var>(&p)) {
    auto [it, inserted] = row.emplace(v->name, value);
    return inserted || it->second == value;
  }
  if (const auto* iri = std::get_if<Iri>(&p)) return value == Term(*iri);
  return value == Term(std::get<Literal>(p));
}

std::vector<Row> match_pattern(const TriplePattern& p, const std::vector<const Triple*>& candidates) {
  std::vector<Row> out;
  for (const Triple* t : candidates) {
    Row row;
    if (match_term(p.subject, t->subject, row) && match_term(p.predicate, t->predicate, row) &&
        match_term(p.object, t->object, row)) {
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::string row_key(const std::vector<Term>& row) {
  std::string key;
  for (const Term& t : row) key += to_ntriples(t) + '\x1f';
  return key;
}

nlohmann::ordered_json term_json(const Term& t) {
  nlohmann::ordered_json j;
  if (const Iri* iri = as_iri(t)) {
    j["type"] = "uri";
    j["value"] = iri->str();
    return j;
  }
  const Literal& lit = std::get<Literal>(t);
  j["type"] = "literal";
  j["value"] = lit.lexical();
  if (lit.language()) j["xml:lang"] = *lit.language();
  if (lit.datatype()) j["datatype"] = lit.datatype()->str();
  return j;
}

}  // namespace

std::vector<std::string> QueryAst::variables() const {
  if (select_vars) return *select_vars;
  std::vector<std::string> vars;
  for (const TriplePattern& p : patterns) {
    for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object}) {
      if (const auto* v = std::get_if<Var>(t)) {
        if (std::find(vars.begin(), vars.end(), v->name) == vars.end()) vars.push_back(v->name);
      }
    }
  }
  return vars;
}

QueryAst parse_query(std::string_view text, const NamespaceConfig& ns) { return QueryParser(text, ns).parse(); }

std::string_view to_string(UnsupportedReason r) {
  switch (r) {
    case UnsupportedReason::NoFixedResource:
      return "NoFixedResource";
    case UnsupportedReason::UnanchoredVariable:
      return "UnanchoredVariable";
    case UnsupportedReason::UnsupportedSyntax:
      return "UnsupportedSyntax";
  }
  return "";
}

Classification classify(const QueryAst& ast, const NamespaceConfig& ns) {
  if (ast.patterns.empty()) return Unsupported{UnsupportedReason::UnsupportedSyntax, std::nullopt, "empty pattern"};
  Supported ok;
  for (std::size_t i = 0; i < ast.patterns.size(); ++i) {
    const TriplePattern& p = ast.patterns[i];
    if (is_resource(p.subject, ns)) {
      ok.anchors.push_back({std::get<Iri>(p.subject), AnchorPosition::Subject});
    } else if (is_resource(p.object, ns)) {
      ok.anchors.push_back({std::get<Iri>(p.object), AnchorPosition::Object});
    } else {
      return Unsupported{UnsupportedReason::NoFixedResource, i,
                         "pattern " + std::to_string(i) + " has no fixed resource as subject or object"};
    }
  }
  if (ast.select_vars) {
    const std::vector<std::string> used = QueryAst{std::nullopt, ast.patterns}.variables();
    for (const std::string& v : *ast.select_vars) {
      if (std::find(used.begin(), used.end(), v) == used.end()) {
        return Unsupported{UnsupportedReason::UnanchoredVariable, std::nullopt, "?" + v + " occurs in no pattern"};
      }
    }
  }
  return ok;
}

void normalize_rows(BindingSet& b) {
  std::vector<std::pair<std::string, std::vector<Term>>> keyed;
  keyed.reserve(b.rows.size());
  for (auto& row : b.rows) keyed.emplace_back(row_key(row), std::move(row));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& c) { return a.first == c.first; }),
              keyed.end());
  b.rows.clear();
  for (auto& [key, row] : keyed) b.rows.push_back(std::move(row));
}

BindingSet evaluate(const QueryAst& ast, const Extractor& extract, const NamespaceConfig& ns,
                    std::size_t parallelism) {
  const Classification c = classify(ast, ns);
  if (const auto* u = std::get_if<Unsupported>(&c)) throw NotSupported(*u);
  const std::vector<Anchor>& anchors = std::get<Supported>(c).anchors;

  // Distinct anchors, in first-use order.
  std::vector<Iri> distinct;
  for (const Anchor& a : anchors) {
    if (std::find(distinct.begin(), distinct.end(), a.iri) == distinct.end()) distinct.push_back(a.iri);
  }
  std::vector<std::shared_ptr<const ResourceGraph>> graphs(distinct.size());
  std::vector<std::exception_ptr> errors(distinct.size());
  {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < distinct.size(); i = next++) {
        try {
          graphs[i] = extract(distinct[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const std::size_t workers = std::min(std::max<std::size_t>(parallelism, 1), distinct.size());
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
  }
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw QueryEvaluationError(distinct[i], errors[i], e.what());
    }
  }
  auto graph_of = [&](const Iri& iri) -> const ResourceGraph& {
    return *graphs[std::find(distinct.begin(), distinct.end(), iri) - distinct.begin()];
  };

  std::vector<Row> rows{Row{}};
  for (std::size_t i = 0; i < ast.patterns.size(); ++i) {
    const Anchor& anchor = anchors[i];
    const ResourceGraph& rg = graph_of(anchor.iri);
    std::vector<const Triple*> candidates;
    Triple abstract_triple{rg.subject, ns.abstract_predicate, Literal("")};
    if (anchor.position == AnchorPosition::Subject) {
      for (const Triple& t : rg.outgoing) candidates.push_back(&t);
      if (rg.abstract) {
        abstract_triple.object = *rg.abstract;
        candidates.push_back(&abstract_triple);
      }
    } else {
      for (const Triple& t : rg.ingoing) candidates.push_back(&t);
      // Self-links live in outgoing.
      for (const Triple& t : rg.outgoing) {
        if (t.object == Term(anchor.iri)) candidates.push_back(&t);
      }
    }
    const std::vector<Row> matches = match_pattern(ast.patterns[i], candidates);
    std::vector<Row> joined;
    for (const Row& left : rows) {
      for (const Row& right : matches) {
        Row merged = left;
        bool ok = true;
        for (const auto& [var, value] : right) {
          auto [it, inserted] = merged.emplace(var, value);
          if (!inserted && it->second != value) {
            ok = false;
            break;
          }
        }
        if (ok) joined.push_back(std::move(merged));
      }
    }
    rows = std::move(joined);
    if (rows.empty()) break;
  }

  BindingSet out;
  out.variables = ast.variables();
  for (const Row& row : rows) {
    std::vector<Term> projected;
    projected.reserve(out.variables.size());
    for (const std::string& v : out.variables) projected.push_back(row.at(v));
    out.rows.push_back(std::move(projected));
  }
  normalize_rows(out);
  return out;
}

std::string bindings_to_sparql_json(const BindingSet& b) {
  std::vector<std::string> rows;
  rows.reserve(b.rows.size());
  for (const auto& row : b.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < b.variables.size() && i < row.size(); ++i) obj[b.variables[i]] = term_json(row[i]);
    rows.push_back(obj.dump());
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  nlohmann::ordered_json head;
  head["vars"] = b.variables;
  std::string out = "{\"head\":" + head.dump() + ",\"results\":{\"bindings\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out += ',';
    out += rows[i];
  }
  out += "]}}";
  return out;
}

}  // namespace kgod
