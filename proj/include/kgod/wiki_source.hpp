#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgod/error.hpp"

namespace kgod {

struct PageFetch {
  std::string title;           // as requested
  std::string resolved_title;  // after normalization on the source side
  std::optional<std::string> wikitext;
  std::optional<std::int64_t> revision_id;
  std::chrono::system_clock::time_point fetched_at;
  bool missing = false;

  friend bool operator==(const PageFetch&, const PageFetch&) = default;
};

struct BacklinkList {
  std::string title;
  std::vector<std::string> backlinks;  // main namespace, source order, no duplicates
  bool truncated = false;

  friend bool operator==(const BacklinkList&, const BacklinkList&) = default;
};

struct LiveMode {
  std::string api_endpoint = "https://en.wikipedia.org/w/api.php";
  std::string user_agent = "kgod/0.1 (on-demand knowledge graph extraction)";
  double rate_limit = 10.0;  // requests per second
  double timeout = 10.0;     // seconds
  int retries = 3;           // attempts, including the first
  double backoff_base = 0.5; // seconds; doubled after each failed attempt
};

struct FixtureMode {
  std::filesystem::path corpus;
};

struct SourceConfig {
  std::variant<LiveMode, FixtureMode> mode = FixtureMode{};
  std::optional<std::size_t> max_backlinks;  // nullopt: unlimited
  std::size_t fetch_parallelism = 4;

  void validate() const;
};

class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& cause) : Error("network error: " + cause) {}
};

class ApiError : public Error {
 public:
  ApiError(std::string code, const std::string& message)
      : Error("API error " + code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class CorpusError : public Error {
 public:
  explicit CorpusError(const std::filesystem::path& path, const std::string& what = "unreadable")
      : Error("corpus " + what + ": " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// A source of page wikitext and backlinks. Implementations are safe to share
// between threads.
class WikiSource {
 public:
  virtual ~WikiSource() = default;

  PageFetch fetch_page_source(std::string_view title);
  BacklinkList fetch_backlinks(std::string_view title, std::optional<std::size_t> max_backlinks);

  // Upstream requests (live) or file reads (fixture) made so far.
  std::size_t request_count() const { return requests_.load(); }

 protected:
  virtual PageFetch do_fetch_page(const std::string& title) = 0;
  virtual BacklinkList do_fetch_backlinks(const std::string& title, std::optional<std::size_t> cap) = 0;
  void count_request() { ++requests_; }

 private:
  std::atomic<std::size_t> requests_{0};
};

// Reads `pages/<encoded title>.wiki` and `backlinks.tsv` from a corpus directory.
class FixtureSource : public WikiSource {
 public:
  explicit FixtureSource(std::filesystem::path corpus);

  // File name used for a title, e.g. "AC/DC" -> "AC%2FDC.wiki".
  static std::string page_file_name(std::string_view title);

 protected:
  PageFetch do_fetch_page(const std::string& title) override;
  BacklinkList do_fetch_backlinks(const std::string& title, std::optional<std::size_t> cap) override;

 private:
  std::filesystem::path corpus_;
  std::map<std::string, std::vector<std::string>> backlinks_;
};

class RateLimiter {
 public:
  explicit RateLimiter(double per_second);
  // Blocks until the next request slot.
  void acquire();

 private:
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
  std::mutex mu_;
};

// MediaWiki action API client.
class LiveSource : public WikiSource {
 public:
  explicit LiveSource(LiveMode cfg);
  ~LiveSource() override;

 protected:
  PageFetch do_fetch_page(const std::string& title) override;
  BacklinkList do_fetch_backlinks(const std::string& title, std::optional<std::size_t> cap) override;

 private:
  struct Impl;
  std::string get(const std::vector<std::pair<std::string, std::string>>& params);

  LiveMode cfg_;
  RateLimiter limiter_;
  std::unique_ptr<Impl> impl_;
};

std::unique_ptr<WikiSource> make_source(const SourceConfig& cfg);

struct FetchOutcome {
  std::optional<PageFetch> page;
  std::exception_ptr error;  // set when page is empty
};

// Fetches every title with at most `parallelism` requests in flight. Results
// follow input order; failures stay in their slot.
std::vector<FetchOutcome> fetch_many(WikiSource& source, const std::vector<std::string>& titles,
                                     std::size_t parallelism);

}  // namespace kgod
