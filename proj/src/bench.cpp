#include "kgod/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "kgod/engine.hpp"

namespace kgod {

namespace {

const char* kBenchMappings = R"(template "Infobox film" -> class dbo:Film
  director -> dbo:director object
  runtime  -> dbo:runtime integer
template "Infobox actor" -> class dbo:Actor
  notable_works -> dbo:starring object
  occupation    -> dbo:occupation string@en
)";

const std::vector<std::string> kWords{"film",  "studio", "drama",  "night",   "road", "music",
                                      "actor", "story",  "camera", "release", "city", "score"};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot write");
  out << content;
  if (!out) throw IoError(path, "write failed");
}

std::string sentence(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(4, 9), word(0, kWords.size() - 1);
  std::string s = "It";
  for (std::size_t n = len(rng); n > 0; --n) s += " " + kWords[word(rng)];
  return s + ".";
}

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string bench_target_title(std::size_t k) { return "Target " + std::to_string(k); }

void generate_synthetic_corpus(const std::vector<std::size_t>& counts, const std::filesystem::path& dir,
                               std::uint64_t seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "pages", ec);
  if (ec) throw IoError(dir, ec.message());

  std::vector<std::size_t> ks = counts;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> runtime(60, 200);
  std::uniform_int_distribution<int> sentences(1, 4);
  std::string index;
  for (std::size_t k : ks) {
    const std::string target = bench_target_title(k);
    std::string src = "{{Infobox film\n| director = [[Director " + std::to_string(k) + "]]\n| runtime = " +
                      std::to_string(runtime(rng)) + "\n}}\n'''" + target + "''' is a synthetic film.";
    for (int n = sentences(rng); n > 0; --n) src += " " + sentence(rng);
    write_file(dir / "pages" / FixtureSource::page_file_name(target), src + "\n");

    for (std::size_t i = 0; i < k; ++i) {
      const std::string title = "Backlink " + std::to_string(k) + " " + std::to_string(i);
      std::string page = "{{Infobox actor\n| occupation = Actor\n| notable_works = [[" + target + "]]\n}}\n'''" +
                         title + "''' is a synthetic actor.";
      for (int n = sentences(rng); n > 0; --n) page += " " + sentence(rng);
      write_file(dir / "pages" / FixtureSource::page_file_name(title), page + "\n");
      index += target + "\t" + title + "\n";
    }
  }
  write_file(dir / "backlinks.tsv", index);
  write_file(dir / "mappings.txt", kBenchMappings);
}

std::optional<LinearFit> fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) return std::nullopt;
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0) {
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

BenchReport run_bench(const std::filesystem::path& corpus, std::vector<std::size_t> counts, const BenchOptions& opts) {
  if (opts.repeats == 0) throw Error("repeats must be at least 1");
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

  std::ifstream in(corpus / "mappings.txt", std::ios::binary);
  if (!in) throw IoError(corpus / "mappings.txt", "cannot read");
  std::ostringstream bytes;
  bytes << in.rdbuf();

  EngineConfig cfg;
  cfg.source.mode = FixtureMode{corpus};
  cfg.source.fetch_parallelism = std::max<std::size_t>(opts.fetch_parallelism, 1);
  cfg.cache_ttl = 0;
  cfg.defaults.max_backlinks = opts.max_backlinks;
  Engine engine(cfg, make_source(cfg.source), load_mappings(bytes.str(), cfg.ns));

  BenchReport report;
  std::vector<double> xs, means, pages;
  for (std::size_t k : counts) {
    const Iri iri = title_to_iri(bench_target_title(k), cfg.ns);
    BenchSample s;
    s.backlink_count = k;
    try {
      s.pages_processed = engine.extract(iri).graph->provenance.pages_processed;  // warm-up
      for (std::size_t r = 0; r < opts.repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const auto result = engine.extract(iri);
        const auto stop = std::chrono::steady_clock::now();
        s.run_times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        s.pages_processed = result.graph->provenance.pages_processed;
      }
    } catch (const std::exception& e) {
      throw BenchError(k, e.what());
    }
    for (double t : s.run_times) s.mean += t;
    s.mean /= static_cast<double>(s.run_times.size());
    if (s.run_times.size() > 1) {
      double ss = 0;
      for (double t : s.run_times) ss += (t - s.mean) * (t - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(s.run_times.size() - 1));
    }
    xs.push_back(static_cast<double>(k));
    means.push_back(s.mean);
    pages.push_back(static_cast<double>(s.pages_processed));
    report.samples.push_back(std::move(s));
  }
  if (const auto fit = fit_line(xs, means)) {
    report.slope = fit->slope;
    report.intercept = fit->intercept;
    report.r_squared = fit->r_squared;
  }
  report.pages_fit = fit_line(xs, pages);
  return report;
}

std::string report_csv(const BenchReport& report) {
  std::string out = "backlinks,mean_ms,stddev_ms\n";
  for (const BenchSample& s : report.samples) {
    out += std::to_string(s.backlink_count) + "," + fmt(s.mean, "%.4f") + "," + fmt(s.stddev, "%.4f") + "\n";
  }
  if (report.slope && report.intercept) {
    out += "# slope=" + fmt(*report.slope, "%.6f") + ", intercept=" + fmt(*report.intercept, "%.6f");
    if (report.r_squared) out += ", r2=" + fmt(*report.r_squared, "%.6f");
    out += "\n";
  }
  return out;
}

}  // namespace kgod
