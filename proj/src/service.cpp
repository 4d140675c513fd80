#include "kgod/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kgod/query.hpp"
#include "kgod/text.hpp"

namespace kgod {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) {
    throw ConfigError(std::string(key) + ": not a number: " + std::string(value));
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(value), &used);
    if (used == value.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(key) + ": not a number: " + std::string(value));
}

std::optional<bool> parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  return std::nullopt;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value) {
  std::filesystem::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

Iri config_iri(std::string_view key, std::string_view value) {
  try {
    return Iri(std::string(value));
  } catch (const InvalidIri&) {
    throw ConfigError(std::string(key) + ": invalid IRI: " + std::string(value));
  }
}

LiveMode& live_mode(ServiceConfig& cfg, std::string_view key) {
  if (auto* live = std::get_if<LiveMode>(&cfg.engine.source.mode)) return *live;
  throw ConfigError(std::string(key) + " requires source = live");
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
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
  if (lit.language()) j["lang"] = *lit.language();
  if (lit.datatype()) j["datatype"] = lit.datatype()->str();
  return j;
}

Response text_response(int status, std::string body) {
  Response r;
  r.status = status;
  r.body = std::move(body);
  if (!r.body.empty() && r.body.back() != '\n') r.body += '\n';
  return r;
}

Response json_response(int status, const nlohmann::ordered_json& j) {
  Response r;
  r.status = status;
  r.content_type = "application/json";
  r.body = j.dump();
  return r;
}

// Status code for a failed extraction.
int extraction_status(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ResourceMissing&) {
    return 404;
  } catch (const EmptyTitle&) {
    return 400;
  } catch (const InvalidIri&) {
    return 400;
  } catch (const ExtractionError&) {
    return 502;
  } catch (...) {
    return 500;
  }
}

std::string content_type_for(const std::filesystem::path& p) {
  static const std::map<std::string, std::string> types{
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript; charset=utf-8"},
      {".mjs", "text/javascript; charset=utf-8"}, {".css", "text/css; charset=utf-8"},
      {".json", "application/json"}, {".svg", "image/svg+xml"}, {".png", "image/png"},
      {".ico", "image/x-icon"}, {".map", "application/json"}, {".txt", "text/plain; charset=utf-8"}};
  auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

const char* kIndexPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>kgod</title></head>
<body>
<h1>Knowledge graph on demand</h1>
<form onsubmit="location.href='/resource/'+encodeURIComponent(this.name.value.replace(/ /g,'_'));return false">
<input name="name" placeholder="Lost_Highway"> <button>Look up</button>
</form>
<form action="/sparql" method="get">
<textarea name="query" rows="4" cols="80">SELECT ?actor WHERE { ?actor dbo:starring dbr:Lost_Highway }</textarea><br>
<button>Query</button>
</form>
</body></html>
)";

}  // namespace

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port out of range: " + std::to_string(port));
  if (host.empty()) throw ConfigError("host must not be empty");
  if (mappings_path.empty()) throw ConfigError("mappings path is required");
  if (ui_path && !std::filesystem::is_directory(*ui_path)) throw ConfigError("ui is not a directory: " + ui_path->string());
  engine.ns.validate();
  engine.source.validate();
  engine.defaults.validate();
  if (engine.cache_ttl < 0) throw ConfigError("cache_ttl must be >= 0");
}

const std::vector<std::string>& service_config_keys() {
  static const std::vector<std::string> keys{
      "host",          "port",           "resource_base",      "ontology_base",     "abstract_predicate",
      "label_language", "source",        "corpus",             "api_endpoint",      "user_agent",
      "rate_limit",    "timeout",        "retries",            "backoff_base",      "max_backlinks",
      "fetch_parallelism", "abstract_sentences", "abstract_language", "follow_redirects", "include_ingoing",
      "cache_capacity", "cache_ttl",     "mappings",           "ui"};
  return keys;
}

void apply_setting(ServiceConfig& cfg, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir) {
  NamespaceConfig& ns = cfg.engine.ns;
  SourceConfig& src = cfg.engine.source;
  ExtractionOptions& opts = cfg.engine.defaults;
  if (key == "host") {
    cfg.host = value;
  } else if (key == "port") {
    cfg.port = parse_number<int>(key, value);
  } else if (key == "resource_base") {
    ns.resource_base = config_iri(key, value);
  } else if (key == "ontology_base") {
    ns.ontology_base = config_iri(key, value);
  } else if (key == "abstract_predicate") {
    ns.abstract_predicate = config_iri(key, value);
  } else if (key == "label_language") {
    ns.label_language = value;
  } else if (key == "source") {
    if (value == "live") {
      if (!std::holds_alternative<LiveMode>(src.mode)) src.mode = LiveMode{};
    } else if (value == "fixture") {
      if (!std::holds_alternative<FixtureMode>(src.mode)) src.mode = FixtureMode{};
    } else {
      throw ConfigError("source must be live or fixture, got " + std::string(value));
    }
  } else if (key == "corpus") {
    auto* fixture = std::get_if<FixtureMode>(&src.mode);
    if (!fixture) throw ConfigError("corpus requires source = fixture");
    fixture->corpus = resolve(base_dir, value);
  } else if (key == "api_endpoint") {
    live_mode(cfg, key).api_endpoint = value;
  } else if (key == "user_agent") {
    live_mode(cfg, key).user_agent = value;
  } else if (key == "rate_limit") {
    live_mode(cfg, key).rate_limit = parse_double(key, value);
  } else if (key == "timeout") {
    live_mode(cfg, key).timeout = parse_double(key, value);
  } else if (key == "retries") {
    live_mode(cfg, key).retries = parse_number<int>(key, value);
  } else if (key == "backoff_base") {
    live_mode(cfg, key).backoff_base = parse_double(key, value);
  } else if (key == "max_backlinks") {
    if (value.empty() || value == "none") {
      src.max_backlinks.reset();
    } else {
      src.max_backlinks = parse_number<std::size_t>(key, value);
    }
  } else if (key == "fetch_parallelism") {
    src.fetch_parallelism = parse_number<std::size_t>(key, value);
  } else if (key == "abstract_sentences") {
    opts.abstract_sentences = parse_number<std::size_t>(key, value);
  } else if (key == "abstract_language") {
    opts.abstract_language = value;
  } else if (key == "follow_redirects") {
    opts.follow_redirects = parse_number<std::size_t>(key, value);
  } else if (key == "include_ingoing") {
    const auto b = parse_bool(value);
    if (!b) throw ConfigError("include_ingoing: not a boolean: " + std::string(value));
    opts.include_ingoing = *b;
  } else if (key == "cache_capacity") {
    cfg.engine.cache_capacity = parse_number<std::size_t>(key, value);
  } else if (key == "cache_ttl") {
    cfg.engine.cache_ttl = parse_double(key, value);
  } else if (key == "mappings") {
    cfg.mappings_path = resolve(base_dir, value);
  } else if (key == "ui") {
    if (value.empty()) {
      cfg.ui_path.reset();
    } else {
      cfg.ui_path = resolve(base_dir, value);
    }
  } else {
    throw ConfigError("unknown setting: " + std::string(key));
  }
}

ServiceConfig parse_service_config(std::string_view text, const std::filesystem::path& base_dir) {
  ServiceConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text::trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = text::trim(line.substr(0, eq));
    const std::string_view value = text::trim(line.substr(eq + 1));
    try {
      apply_setting(cfg, key, value, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

ServiceConfig load_service_config(const std::filesystem::path& file, const EnvLookup& env) {
  ServiceConfig cfg = file.empty() ? ServiceConfig{} : parse_service_config(read_file(file), file.parent_path());
  if (env) {
    for (const std::string& key : service_config_keys()) {
      std::string name = "KGOD_";
      for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (auto v = env(name)) {
        try {
          apply_setting(cfg, key, *v);
        } catch (const ConfigError& e) {
          throw ConfigError(name + ": " + e.what());
        }
      }
    }
  }
  return cfg;
}

std::string_view media_type(Format f) {
  switch (f) {
    case Format::NTriples:
      return "application/n-triples";
    case Format::Turtle:
      return "text/turtle; charset=utf-8";
    case Format::SparqlJson:
      return "application/sparql-results+json";
    case Format::JsonGraph:
      return "application/json";
    case Format::Html:
      return "text/html; charset=utf-8";
  }
  return "";
}

std::optional<Format> negotiate(std::string_view accept, const std::vector<Format>& offered) {
  struct Range {
    std::string type, subtype;
    double q = 1;
  };
  std::vector<Range> ranges;
  std::size_t pos = 0;
  while (pos <= accept.size()) {
    std::size_t end = accept.find(',', pos);
    if (end == std::string_view::npos) end = accept.size();
    const std::string_view item = text::trim(accept.substr(pos, end - pos));
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t semi = item.find(';');
    const std::string_view mt = text::trim(item.substr(0, semi));
    const std::size_t slash = mt.find('/');
    if (slash == std::string_view::npos) continue;
    Range r;
    for (char c : mt.substr(0, slash)) r.type += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (char c : mt.substr(slash + 1)) r.subtype += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::string_view rest = semi == std::string_view::npos ? std::string_view() : item.substr(semi + 1);
    while (!rest.empty()) {
      const std::size_t next = rest.find(';');
      const std::string_view param = text::trim(rest.substr(0, next));
      rest = next == std::string_view::npos ? std::string_view() : rest.substr(next + 1);
      if (param.size() > 2 && (param[0] == 'q' || param[0] == 'Q') && param[1] == '=') {
        try {
          r.q = std::clamp(std::stod(std::string(param.substr(2))), 0.0, 1.0);
        } catch (const std::exception&) {
          r.q = 0;
        }
      }
    }
    ranges.push_back(std::move(r));
  }
  if (ranges.empty()) ranges.push_back({"*", "*", 1});

  auto aliases = [](Format f) -> std::vector<std::pair<std::string, std::string>> {
    switch (f) {
      case Format::NTriples:
        return {{"application", "n-triples"}, {"text", "plain"}};
      case Format::Turtle:
        return {{"text", "turtle"}};
      case Format::SparqlJson:
        return {{"application", "sparql-results+json"}, {"application", "json"}};
      case Format::JsonGraph:
        return {{"application", "json"}};
      case Format::Html:
        return {{"text", "html"}, {"application", "xhtml+xml"}};
    }
    return {};
  };

  struct Score {
    double q = -1;
    int specificity = -1;
    std::size_t position = 0;
  };
  std::optional<Format> best;
  Score best_score;
  for (Format f : offered) {
    Score fs;
    for (const auto& [type, subtype] : aliases(f)) {
      // The most specific matching range decides the quality of a media type.
      Score ms;
      for (std::size_t i = 0; i < ranges.size(); ++i) {
        const Range& r = ranges[i];
        int spec = -1;
        if (r.type == type && r.subtype == subtype) {
          spec = 2;
        } else if (r.type == type && r.subtype == "*") {
          spec = 1;
        } else if (r.type == "*" && r.subtype == "*") {
          spec = 0;
        }
        if (spec > ms.specificity) ms = {r.q, spec, i};
      }
      if (ms.specificity < 0) continue;
      if (ms.q > fs.q || (ms.q == fs.q && (ms.specificity > fs.specificity ||
                                            (ms.specificity == fs.specificity && ms.position < fs.position)))) {
        fs = ms;
      }
    }
    if (fs.q <= 0) continue;
    if (!best || fs.q > best_score.q ||
        (fs.q == best_score.q && (fs.specificity > best_score.specificity ||
                                  (fs.specificity == best_score.specificity && fs.position < best_score.position)))) {
      best = f;
      best_score = fs;
    }
  }
  return best;
}

std::optional<std::string> Request::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

std::string Request::header(const std::string& name) const {
  auto it = headers.find(name);
  return it == headers.end() ? std::string() : it->second;
}

std::optional<std::string> Response::header(std::string_view name) const {
  for (const auto& [k, v] : headers) {
    if (text::iequals(k, name)) return v;
  }
  return std::nullopt;
}

std::string graph_to_json(const ResourceGraph& rg, bool cache_hit) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["subject"] = rg.subject.str();
  ordered_json out = ordered_json::array();
  for (const Triple& t : rg.outgoing) out.push_back(ordered_json::array({t.predicate.str(), term_json(t.object)}));
  j["outgoing"] = std::move(out);
  ordered_json in = ordered_json::array();
  for (const Triple& t : rg.ingoing) in.push_back(ordered_json::array({t.subject.str(), t.predicate.str()}));
  j["ingoing"] = std::move(in);
  if (rg.abstract) {
    j["abstract"] = {{"text", rg.abstract->lexical()}, {"lang", rg.abstract->language().value_or("")}};
  } else {
    j["abstract"] = nullptr;
  }
  const Provenance& p = rg.provenance;
  ordered_json prov;
  prov["revision_id"] = p.revision_id ? ordered_json(*p.revision_id) : ordered_json(nullptr);
  prov["backlink_count"] = p.backlink_count;
  prov["backlinks_truncated"] = p.backlinks_truncated;
  prov["pages_processed"] = p.pages_processed;
  prov["redirects"] = p.redirects;
  ordered_json warnings = ordered_json::array();
  for (const CoercionWarning& w : p.coercion_warnings) {
    warnings.push_back({{"page", w.page}, {"param", w.param}, {"reason", w.reason}});
  }
  prov["coercion_warnings"] = std::move(warnings);
  prov["source_warnings"] = p.source_warnings;
  static const char* kSteps[] = {"resolve", "backlinks", "fetch", "generate", "abstract"};
  ordered_json elapsed;
  for (std::size_t i = 0; i < p.elapsed_ms.size(); ++i) elapsed[kSteps[i]] = p.elapsed_ms[i];
  prov["elapsed_ms"] = std::move(elapsed);
  prov["total_ms"] = p.total_ms();
  prov["cache"] = cache_hit ? "HIT" : "MISS";
  j["provenance"] = std::move(prov);
  return j.dump();
}

Service::Service(ServiceConfig cfg) : Service(std::move(cfg), nullptr) {}

Service::Service(ServiceConfig cfg, std::unique_ptr<WikiSource> source) : cfg_(std::move(cfg)) {
  cfg_.validate();
  MappingSet ms = load_mappings(read_file(cfg_.mappings_path), cfg_.engine.ns);
  if (!source) source = make_source(cfg_.engine.source);
  engine_ = std::make_unique<Engine>(cfg_.engine, std::move(source), std::move(ms));
}

Response Service::handle(const Request& req) {
  ++requests_;
  Response r = [&] {
    const std::string& path = req.path;
    if (path.starts_with("/resource/")) {
      if (req.method != "GET" && req.method != "HEAD") return text_response(405, "method not allowed");
      return resource(path.substr(10), req);
    }
    if (path == "/sparql") {
      if (req.method != "GET" && req.method != "POST") return text_response(405, "method not allowed");
      return sparql(req);
    }
    if (path == "/admin/reload-mappings") {
      if (req.method != "POST") return text_response(405, "method not allowed");
      return reload_mappings();
    }
    if (path == "/healthz") return healthz();
    if (path == "/metrics") return metrics();
    if (req.method != "GET" && req.method != "HEAD") return text_response(405, "method not allowed");
    return static_asset(path);
  }();
  if (r.status >= 400) ++errors_;
  return r;
}

Response Service::resource(const std::string& name, const Request& req) {
  const std::vector<Format> offered{Format::Turtle, Format::NTriples, Format::JsonGraph, Format::Html};
  const auto format = negotiate(req.header("accept"), offered);
  if (!format) {
    return text_response(406, "acceptable: application/n-triples, text/turtle, application/json, text/html");
  }

  ExtractionOptions opts = cfg_.engine.defaults;
  if (auto v = req.param("include_ingoing")) {
    const auto b = parse_bool(*v);
    if (!b) return text_response(400, "include_ingoing must be true or false");
    opts.include_ingoing = *b;
  }
  if (auto v = req.param("max_backlinks")) {
    std::size_t m = 0;
    const auto [end, ec] = std::from_chars(v->data(), v->data() + v->size(), m);
    if (v->empty() || ec != std::errc() || end != v->data() + v->size()) {
      return text_response(400, "max_backlinks must be a non-negative integer");
    }
    // Requests may lower the configured limit, never raise it.
    opts.max_backlinks = cfg_.engine.defaults.max_backlinks ? std::min(m, *cfg_.engine.defaults.max_backlinks) : m;
  }

  Engine::Result result;
  try {
    const Iri iri = title_to_iri(name, engine_->ns());
    result = engine_->extract(iri, opts);
  } catch (const std::exception& e) {
    const int status = extraction_status(std::current_exception());
    return text_response(status, e.what());
  }
  const ResourceGraph& rg = *result.graph;

  Response r;
  r.content_type = std::string(media_type(*format));
  r.headers = {{"X-Pages-Processed", std::to_string(rg.provenance.pages_processed)},
               {"X-Backlink-Count", std::to_string(rg.provenance.backlink_count)},
               {"X-Cache", result.cache_hit ? "HIT" : "MISS"},
               {"Vary", "Accept"}};
  switch (*format) {
    case Format::NTriples:
      r.body = serialize_ntriples(rg.all_triples(engine_->ns()));
      break;
    case Format::Turtle:
      r.body = serialize_turtle(rg.all_triples(engine_->ns()), engine_->ns());
      break;
    case Format::JsonGraph:
      r.body = graph_to_json(rg, result.cache_hit);
      break;
    default: {
      if (cfg_.ui_path && std::filesystem::exists(*cfg_.ui_path / "index.html")) {
        r.body = read_file(*cfg_.ui_path / "index.html");
        break;
      }
      const std::string& base = engine_->ns().resource_base.str();
      auto cell = [&](const Term& t) {
        const Iri* iri = as_iri(t);
        if (iri && iri->starts_with(base)) {
          const std::string local = iri->str().substr(base.size());
          return "<a href=\"/resource/" + html_escape(local) + "\">" + html_escape(local) + "</a>";
        }
        return html_escape(to_ntriples(t));
      };
      std::string html = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>" +
                         html_escape(rg.subject.str()) + "</title></head><body>\n<h1>" +
                         html_escape(rg.subject.str()) + "</h1>\n";
      if (rg.abstract) html += "<p>" + html_escape(rg.abstract->lexical()) + "</p>\n";
      html += "<table>\n";
      for (const Triple& t : rg.outgoing) {
        html += "<tr><td>" + cell(t.subject) + "</td><td>" + cell(t.predicate) + "</td><td>" + cell(t.object) +
                "</td></tr>\n";
      }
      for (const Triple& t : rg.ingoing) {
        html += "<tr><td>" + cell(t.subject) + "</td><td>" + cell(t.predicate) + "</td><td>" + cell(t.object) +
                "</td></tr>\n";
      }
      html += "</table>\n</body></html>\n";
      r.body = std::move(html);
    }
  }
  return r;
}

Response Service::sparql(const Request& req) {
  using nlohmann::ordered_json;
  std::optional<std::string> text = req.param("query");
  if (!text && req.method == "POST" && req.header("content-type").starts_with("application/sparql-query")) {
    text = req.body;
  }
  if (!text || text::trim(*text).empty()) {
    return json_response(400, {{"error", "missing query"}});
  }
  if (!negotiate(req.header("accept"), {Format::SparqlJson})) {
    return text_response(406, "acceptable: application/sparql-results+json");
  }

  QueryAst ast;
  try {
    ast = parse_query(*text, engine_->ns());
  } catch (const UnsupportedSyntax& e) {
    return json_response(400, {{"error", "unsupported"},
                               {"reason", to_string(UnsupportedReason::UnsupportedSyntax)},
                               {"pattern_index", nullptr},
                               {"detail", e.feature()}});
  } catch (const ParseError& e) {
    return json_response(400, {{"error", "parse"}, {"position", e.position()}, {"expected", e.expected()}});
  }
  const Classification c = classify(ast, engine_->ns());
  if (const auto* u = std::get_if<Unsupported>(&c)) {
    return json_response(400, {{"error", "unsupported"},
                               {"reason", to_string(u->reason)},
                               {"pattern_index", u->pattern_index ? ordered_json(*u->pattern_index) : ordered_json()},
                               {"detail", u->detail}});
  }

  // A resource without a page has no triples; it just matches nothing.
  Extractor extract = [this](const Iri& iri) -> std::shared_ptr<const ResourceGraph> {
    try {
      return engine_->extract(iri).graph;
    } catch (const ResourceMissing&) {
      return std::make_shared<const ResourceGraph>(ResourceGraph{iri, {}, {}, std::nullopt, {}});
    }
  };
  try {
    const BindingSet b = evaluate(ast, extract, engine_->ns(), engine_->config().source.fetch_parallelism);
    Response r;
    r.content_type = std::string(media_type(Format::SparqlJson));
    r.body = bindings_to_sparql_json(b);
    return r;
  } catch (const QueryEvaluationError& e) {
    const int status = extraction_status(e.cause());
    return json_response(status == 500 ? 500 : 502,
                         {{"error", "extraction"}, {"anchor", e.anchor().str()}, {"message", e.what()}});
  }
}

Response Service::reload_mappings() {
  try {
    MappingSet ms = load_mappings(read_file(cfg_.mappings_path), engine_->ns());
    const std::string version = ms.version;
    engine_->swap_mappings(std::move(ms));
    return text_response(200, "mappings reloaded, version " + version);
  } catch (const std::exception& e) {
    return text_response(500, std::string("reload failed, previous mappings kept: ") + e.what());
  }
}

Response Service::healthz() const {
  return engine_->mappings() ? text_response(200, "ok") : text_response(503, "no mappings");
}

Response Service::metrics() const {
  const EngineMetrics m = engine_->metrics();
  std::ostringstream out;
  out << "kgod_requests_total " << requests_.load() << '\n'
      << "kgod_request_errors_total " << errors_.load() << '\n'
      << "kgod_cache_hits_total " << m.cache.hits << '\n'
      << "kgod_cache_misses_total " << m.cache.misses << '\n'
      << "kgod_cache_entries " << engine_->cache_size() << '\n'
      << "kgod_extractions_total " << m.extractions << '\n'
      << "kgod_extraction_ms_mean " << (m.extractions ? m.extraction_ms / m.extractions : 0.0) << '\n'
      << "kgod_upstream_requests_total " << m.upstream_requests << '\n'
      << "kgod_mappings_version{version=\"" << engine_->mappings()->version << "\"} 1\n";
  return text_response(200, out.str());
}

Response Service::static_asset(const std::string& path) const {
  if (!cfg_.ui_path) {
    if (path == "/" || path == "/index.html") {
      Response r;
      r.content_type = "text/html; charset=utf-8";
      r.body = kIndexPage;
      return r;
    }
    return text_response(404, "not found");
  }
  std::filesystem::path rel = path == "/" ? "index.html" : std::filesystem::path(path).relative_path();
  for (const auto& part : rel) {
    if (part == "..") return text_response(404, "not found");
  }
  const std::filesystem::path file = *cfg_.ui_path / rel;
  if (!std::filesystem::is_regular_file(file)) return text_response(404, "not found");
  Response r;
  r.content_type = content_type_for(file);
  r.body = read_file(file);
  return r;
}

}  // namespace kgod
