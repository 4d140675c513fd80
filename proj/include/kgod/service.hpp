#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgod/engine.hpp"
#include "kgod/error.hpp"

namespace kgod {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  EngineConfig engine;
  std::filesystem::path mappings_path;
  std::optional<std::filesystem::path> ui_path;

  void validate() const;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Sets one key ("port", "corpus", "cache_ttl", ...). Relative paths resolve against base_dir.
void apply_setting(ServiceConfig& cfg, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir = {});

// `key = value` lines; '#' starts a comment line.
ServiceConfig parse_service_config(std::string_view text, const std::filesystem::path& base_dir = {});

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

// Reads the file (if non-empty) and then applies KGOD_<KEY> overrides.
ServiceConfig load_service_config(const std::filesystem::path& file, const EnvLookup& env = process_env());

// Keys understood by apply_setting, in documentation order.
const std::vector<std::string>& service_config_keys();

enum class Format { NTriples, Turtle, SparqlJson, JsonGraph, Html };

std::string_view media_type(Format f);

// Picks the best of `offered` for an Accept header value; nullopt when none is acceptable.
std::optional<Format> negotiate(std::string_view accept, const std::vector<Format>& offered);

struct Request {
  std::string method = "GET";
  std::string path;                                 // decoded
  std::multimap<std::string, std::string> params;  // query string and form fields
  std::map<std::string, std::string> headers;       // lowercase names
  std::string body;

  std::optional<std::string> param(const std::string& name) const;
  std::string header(const std::string& name) const;
};

struct Response {
  int status = 200;
  std::string content_type = "text/plain; charset=utf-8";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  std::optional<std::string> header(std::string_view name) const;
};

std::string graph_to_json(const ResourceGraph& rg, bool cache_hit);

// Routes and handlers, independent of any socket layer.
class Service {
 public:
  explicit Service(ServiceConfig cfg);
  Service(ServiceConfig cfg, std::unique_ptr<WikiSource> source);

  Response handle(const Request& req);

  Response resource(const std::string& name, const Request& req);
  Response sparql(const Request& req);
  Response reload_mappings();
  Response healthz() const;
  Response metrics() const;
  Response static_asset(const std::string& path) const;

  Engine& engine() { return *engine_; }
  const ServiceConfig& config() const { return cfg_; }

 private:
  ServiceConfig cfg_;
  std::unique_ptr<Engine> engine_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> errors_{0};
};

// cpp-httplib binding.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  void serve();
  void start_background();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kgod
