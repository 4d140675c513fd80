#include "kgod/wiki_source.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "kgod/rdf.hpp"
#include "kgod/text.hpp"

namespace kgod {

void SourceConfig::validate() const {
  if (fetch_parallelism < 1) throw Error("fetch_parallelism must be at least 1");
  if (const auto* live = std::get_if<LiveMode>(&mode)) {
    if (!(live->rate_limit > 0)) throw Error("rate_limit must be positive");
    if (!(live->timeout > 0)) throw Error("timeout must be positive");
    if (live->retries < 1) throw Error("retries must be at least 1");
    if (live->api_endpoint.empty()) throw Error("api_endpoint is empty");
  }
}

PageFetch WikiSource::fetch_page_source(std::string_view title) {
  const std::string normalized = normalize_title(title);
  if (normalized.empty()) throw EmptyTitle();
  PageFetch f = do_fetch_page(normalized);
  f.title = std::string(title);
  return f;
}

BacklinkList WikiSource::fetch_backlinks(std::string_view title, std::optional<std::size_t> max_backlinks) {
  const std::string normalized = normalize_title(title);
  if (normalized.empty()) throw EmptyTitle();
  BacklinkList list = do_fetch_backlinks(normalized, max_backlinks);
  list.title = std::string(title);
  return list;
}

// Fixture corpus.

FixtureSource::FixtureSource(std::filesystem::path corpus) : corpus_(std::move(corpus)) {
  std::error_code ec;
  if (!std::filesystem::is_directory(corpus_, ec)) throw CorpusError(corpus_, "directory missing");
  const std::filesystem::path index = corpus_ / "backlinks.tsv";
  if (!std::filesystem::exists(index, ec)) return;
  std::ifstream in(index, std::ios::binary);
  if (!in) throw CorpusError(index);

  std::map<std::string, std::set<std::string>> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.starts_with('#')) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw CorpusError(index, "line without tab");
    const std::string target = normalize_title(line.substr(0, tab));
    const std::string source = normalize_title(line.substr(tab + 1));
    if (target.empty() || source.empty()) throw CorpusError(index, "empty title");
    if (target == source || !seen[target].insert(source).second) continue;
    backlinks_[target].push_back(source);
  }
}

std::string FixtureSource::page_file_name(std::string_view title) {
  std::string local = encode_local_name(title);
  std::string out;
  for (char c : local) {
    if (c == '/') {
      out += "%2F";
    } else {
      out += c;
    }
  }
  return out + ".wiki";
}

PageFetch FixtureSource::do_fetch_page(const std::string& title) {
  count_request();
  PageFetch f;
  f.resolved_title = title;
  const std::filesystem::path path = corpus_ / "pages" / page_file_name(title);
  std::error_code ec;
  const auto status = std::filesystem::status(path, ec);
  if (!std::filesystem::exists(status)) {
    f.missing = true;
    f.fetched_at = std::chrono::system_clock::time_point{};
    return f;
  }
  if (!std::filesystem::is_regular_file(status)) throw CorpusError(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  f.wikitext = ss.str();
  // The file's mtime keeps repeated fetches of an unchanged corpus identical.
  const auto mtime = std::filesystem::last_write_time(path, ec);
  if (!ec) {
    f.fetched_at = std::chrono::time_point_cast<std::chrono::system_clock::duration>(
        std::chrono::file_clock::to_sys(mtime));
  }
  return f;
}

BacklinkList FixtureSource::do_fetch_backlinks(const std::string& title, std::optional<std::size_t> cap) {
  count_request();
  BacklinkList list;
  auto it = backlinks_.find(title);
  if (it == backlinks_.end()) return list;
  list.backlinks = it->second;
  if (cap && list.backlinks.size() > *cap) {
    list.backlinks.resize(*cap);
    list.truncated = true;
  }
  return list;
}

// Rate limiting.

RateLimiter::RateLimiter(double per_second)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / per_second))),
      next_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    slot = std::max(next_, std::chrono::steady_clock::now());
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

std::unique_ptr<WikiSource> make_source(const SourceConfig& cfg) {
  cfg.validate();
  if (const auto* live = std::get_if<LiveMode>(&cfg.mode)) return std::make_unique<LiveSource>(*live);
  return std::make_unique<FixtureSource>(std::get<FixtureMode>(cfg.mode).corpus);
}

std::vector<FetchOutcome> fetch_many(WikiSource& source, const std::vector<std::string>& titles,
                                     std::size_t parallelism) {
  std::vector<FetchOutcome> out(titles.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < titles.size(); i = next++) {
      try {
        out[i].page = source.fetch_page_source(titles[i]);
      } catch (...) {
        out[i].error = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(std::max<std::size_t>(parallelism, 1), titles.size());
  if (workers <= 1) {
    work();
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

}  // namespace kgod
