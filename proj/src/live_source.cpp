#include <httplib.h>

#include <json.hpp>
#include <set>
#include <thread>

#include "kgod/rdf.hpp"
#include "kgod/wiki_source.hpp"

namespace kgod {

using nlohmann::json;

struct LiveSource::Impl {
  std::string scheme_host_port;
  std::string path;
};

namespace {

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string();
}

void throw_if_api_error(const json& j) {
  auto it = j.find("error");
  if (it == j.end() || !it->is_object()) return;
  throw ApiError(string_field(*it, "code"), string_field(*it, "info"));
}

std::optional<std::string> revision_content(const json& rev) {
  if (auto slots = rev.find("slots"); slots != rev.end()) {
    if (auto main = slots->find("main"); main != slots->end()) {
      if (auto c = main->find("content"); c != main->end() && c->is_string()) return c->get<std::string>();
      if (auto c = main->find("*"); c != main->end() && c->is_string()) return c->get<std::string>();
    }
  }
  if (auto c = rev.find("*"); c != rev.end() && c->is_string()) return c->get<std::string>();
  if (auto c = rev.find("content"); c != rev.end() && c->is_string()) return c->get<std::string>();
  return std::nullopt;
}

}  // namespace

LiveSource::LiveSource(LiveMode cfg) : cfg_(std::move(cfg)), limiter_(cfg_.rate_limit), impl_(std::make_unique<Impl>()) {
  const std::size_t scheme_end = cfg_.api_endpoint.find("://");
  if (scheme_end == std::string::npos) throw Error("api_endpoint must be an absolute URL: " + cfg_.api_endpoint);
  const std::size_t path_start = cfg_.api_endpoint.find('/', scheme_end + 3);
  impl_->scheme_host_port = cfg_.api_endpoint.substr(0, path_start);
  impl_->path = path_start == std::string::npos ? "/" : cfg_.api_endpoint.substr(path_start);
}

LiveSource::~LiveSource() = default;

std::string LiveSource::get(const std::vector<std::pair<std::string, std::string>>& params) {
  httplib::Params query(params.begin(), params.end());
  const httplib::Headers headers{{"User-Agent", cfg_.user_agent}};
  const auto seconds = static_cast<time_t>(cfg_.timeout);
  const auto micros = static_cast<time_t>((cfg_.timeout - static_cast<double>(seconds)) * 1e6);

  std::string cause;
  for (int attempt = 0; attempt < cfg_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(cfg_.backoff_base * double(1 << (attempt - 1))));
    }
    limiter_.acquire();
    count_request();
    // One client per request: httplib serializes requests on a shared client.
    httplib::Client client(impl_->scheme_host_port);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    auto res = client.Get(impl_->path, query, headers);
    if (!res) {
      cause = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      cause = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw ApiError("http-" + std::to_string(res->status), res->body.substr(0, 200));
    return res->body;
  }
  throw NetworkError(cause);
}

PageFetch LiveSource::do_fetch_page(const std::string& title) {
  const std::string body = get({{"action", "query"},
                                {"format", "json"},
                                {"prop", "revisions"},
                                {"rvprop", "content|ids"},
                                {"rvslots", "main"},
                                {"titles", title}});
  PageFetch f;
  f.resolved_title = title;
  f.fetched_at = std::chrono::system_clock::now();
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ApiError("bad-json", "unparseable response");
  throw_if_api_error(j);

  const json* page = nullptr;
  if (auto q = j.find("query"); q != j.end()) {
    if (auto pages = q->find("pages"); pages != q->end() && !pages->empty()) {
      page = pages->is_array() ? &(*pages)[0] : &pages->begin().value();
    }
  }
  if (!page || page->contains("missing") || page->contains("invalid")) {
    if (page && page->contains("title")) f.resolved_title = string_field(*page, "title");
    f.missing = true;
    return f;
  }
  if (page->contains("title")) f.resolved_title = string_field(*page, "title");
  auto revs = page->find("revisions");
  if (revs == page->end() || !revs->is_array() || revs->empty()) {
    f.missing = true;
    return f;
  }
  const json& rev = (*revs)[0];
  f.wikitext = revision_content(rev);
  if (!f.wikitext) throw ApiError("no-content", "revision without content");
  if (auto id = rev.find("revid"); id != rev.end() && id->is_number_integer()) f.revision_id = id->get<std::int64_t>();
  return f;
}

BacklinkList LiveSource::do_fetch_backlinks(const std::string& title, std::optional<std::size_t> cap) {
  BacklinkList list;
  std::set<std::string> seen;
  std::vector<std::pair<std::string, std::string>> cont;
  while (true) {
    std::vector<std::pair<std::string, std::string>> params{{"action", "query"},  {"format", "json"},
                                                            {"list", "backlinks"}, {"bltitle", title},
                                                            {"blnamespace", "0"},  {"bllimit", "max"}};
    params.insert(params.end(), cont.begin(), cont.end());
    const json j = json::parse(get(params), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ApiError("bad-json", "unparseable response");
    throw_if_api_error(j);

    const json* items = nullptr;
    if (auto q = j.find("query"); q != j.end()) {
      if (auto bl = q->find("backlinks"); bl != q->end() && bl->is_array()) items = &*bl;
    }
    const auto more = j.find("continue");
    const bool has_more = more != j.end() && more->is_object();
    if (items) {
      for (const json& item : *items) {
        if (auto ns = item.find("ns"); ns != item.end() && ns->is_number() && ns->get<int>() != 0) continue;
        const std::string source = normalize_title(string_field(item, "title"));
        if (source.empty() || source == title || !seen.insert(source).second) continue;
        if (cap && list.backlinks.size() == *cap) {
          list.truncated = true;
          return list;
        }
        list.backlinks.push_back(source);
      }
    }
    if (!has_more) return list;
    if (cap && list.backlinks.size() == *cap) {
      list.truncated = true;
      return list;
    }
    cont.clear();
    for (const auto& [k, v] : more->items()) {
      if (v.is_string()) cont.emplace_back(k, v.get<std::string>());
    }
  }
}

}  // namespace kgod
