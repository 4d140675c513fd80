#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgod/error.hpp"
#include "kgod/extraction.hpp"

namespace kgod {

class IoError : public Error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : Error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

class BenchError : public Error {
 public:
  BenchError(std::size_t backlinks, const std::string& what)
      : Error("k=" + std::to_string(backlinks) + ": " + what), backlinks_(backlinks) {}
  std::size_t backlinks() const { return backlinks_; }

 private:
  std::size_t backlinks_;
};

std::string bench_target_title(std::size_t k);

// Writes pages/, backlinks.tsv and mappings.txt. Same counts and seed give identical bytes.
void generate_synthetic_corpus(const std::vector<std::size_t>& counts, const std::filesystem::path& dir,
                               std::uint64_t seed = 1);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  std::optional<double> r_squared;  // absent when y has no variance
};

// Least squares; nullopt with fewer than two distinct x values.
std::optional<LinearFit> fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

struct BenchSample {
  std::size_t backlink_count = 0;
  std::vector<double> run_times;  // ms
  double mean = 0;
  double stddev = 0;  // sample standard deviation; 0 for a single run
  std::size_t pages_processed = 0;
};

struct BenchReport {
  std::vector<BenchSample> samples;  // ascending backlink_count
  std::optional<double> slope;       // ms per backlink
  std::optional<double> intercept;
  std::optional<double> r_squared;
  std::optional<LinearFit> pages_fit;  // pages_processed against backlink_count
};

struct BenchOptions {
  std::size_t repeats = 10;
  std::optional<std::size_t> max_backlinks;
  std::size_t fetch_parallelism = 1;
};

BenchReport run_bench(const std::filesystem::path& corpus, std::vector<std::size_t> counts,
                      const BenchOptions& opts = {});

std::string report_csv(const BenchReport& report);

}  // namespace kgod
