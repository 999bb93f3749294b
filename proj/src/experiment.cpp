#include "rlcache/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rlcache/manager.hpp"
#include "rlcache/rng.hpp"
#include "rlcache/workload.hpp"

namespace rlcache {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return m;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::vector<WindowRow> window_rows(std::uint64_t seed, const std::vector<WindowStats>& windows) {
  std::vector<WindowRow> rows;
  rows.reserve(windows.size());
  for (const auto& w : windows) {
    const PrecisionRecall prf = w.prf();
    rows.push_back({seed, w.phase, w.index, {w.hit_rate(), w.caching_rate(), prf.precision, prf.recall, prf.f1, w.mean_ttl_deviation(), w.utilization}});
  }
  return rows;
}

SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  CacheManager manager(config, seed);
  const std::uint64_t workload_seed = mix_seed(seed, fnv1a("workload"));
  for (std::size_t i = 0; i < config.phases.size(); ++i) {
    WorkloadSpec spec = config.phases[i];
    spec.record_count = config.record_count;
    manager.begin_phase(spec.name);
    WorkloadGenerator gen(spec, mix_seed(workload_seed, i), config.ops_per_second);
    while (!gen.done()) manager.apply(gen.next());
  }
  manager.finish();
  SeedRun run;
  run.seed = seed;
  run.windows = manager.ledger().windows();
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::string run_id(const ExperimentConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, config_hash(config));
  return config.name + "-" + buf;
}

json aggregate_phases(const std::vector<WindowRow>& rows) {
  std::vector<std::string> order;
  // phase -> seed -> per-metric sums and window count
  std::map<std::string, std::map<std::uint64_t, std::pair<std::vector<double>, std::size_t>>> acc;
  for (const auto& r : rows) {
    if (!acc.count(r.phase)) order.push_back(r.phase);
    auto& [sums, n] = acc[r.phase][r.seed];
    if (sums.empty()) sums.assign(kMetricNames.size(), 0.0);
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) sums[m] += r.metrics.at(m);
    ++n;
  }
  json phases = json::array();
  for (const auto& phase : order) {
    const auto& per_seed = acc.at(phase);
    json metrics = json::object();
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
      std::vector<double> xs;
      for (const auto& [seed, s] : per_seed) xs.push_back(s.first[m] / static_cast<double>(s.second));
      const MeanStd ms = mean_std(xs);
      metrics[kMetricNames[m]] = {{"mean", ms.mean}, {"std", ms.std}};
    }
    phases.push_back({{"phase", phase}, {"repetitions", per_seed.size()}, {"windows_per_seed", per_seed.begin()->second.second}, {"metrics", metrics}});
  }
  return phases;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const std::string id = run_id(config);
  std::ofstream csv;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    fs::remove(fs::path(out_dir) / "summary.json");
    csv = open_output(fs::path(out_dir) / "windows.csv");
    write_csv_header(csv);
  }

  ExperimentResult result;
  std::vector<WindowRow> rows;
  for (std::uint64_t seed : config.seeds) {
    SeedRun run = run_seed(config, seed);
    if (csv.is_open()) {
      write_csv_rows(csv, id, seed, run.windows);
      csv.flush();
      if (!csv) throw std::runtime_error("cannot write windows.csv in " + out_dir);
    }
    auto r = window_rows(seed, run.windows);
    rows.insert(rows.end(), r.begin(), r.end());
    result.runs.push_back(std::move(run));
  }

  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64, config_hash(config));
  result.summary = {{"run_id", id},
                    {"config_hash", hash},
                    {"config", to_json(config)},
                    {"seeds", config.seeds},
                    {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                    {"phases", aggregate_phases(rows)}};
  if (!out_dir.empty()) write_json(fs::path(out_dir) / "summary.json", result.summary);
  return result;
}

json seed_variance(const std::vector<SeedRun>& runs) {
  if (runs.size() < 2) throw std::invalid_argument("seed variance needs at least two runs");
  const std::size_t n = runs.front().windows.size();
  for (const auto& r : runs) {
    if (r.windows.size() != n) throw std::invalid_argument("runs disagree on the number of windows");
  }
  if (n == 0) throw std::invalid_argument("runs produced no windows");

  json per_window = json::array();
  std::vector<double> stds;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xs;
    for (const auto& r : runs) xs.push_back(r.windows[i].hit_rate());
    const MeanStd ms = mean_std(xs);
    stds.push_back(ms.std);
    per_window.push_back({{"window", i}, {"phase", runs.front().windows[i].phase}, {"hit_rate_mean", ms.mean}, {"hit_rate_std", ms.std}});
  }
  const std::size_t k = std::max<std::size_t>(1, (n + 9) / 10);
  double early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    early += stds[i];
    late += stds[n - k + i];
  }
  early /= static_cast<double>(k);
  late /= static_cast<double>(k);
  std::vector<std::uint64_t> seeds;
  for (const auto& r : runs) seeds.push_back(r.seed);
  return {{"seeds", seeds},
          {"windows", n},
          {"edge_windows", k},
          {"early_hit_rate_std", early},
          {"late_hit_rate_std", late},
          {"early_exceeds_late", early > late},
          {"per_window", per_window}};
}

json repeat_and_report(ExperimentConfig config, const std::vector<std::uint64_t>& seeds, const std::string& out_dir) {
  if (seeds.size() < 2) throw std::invalid_argument("repeat_and_report needs at least two seeds");
  config.seeds = seeds;
  const ExperimentResult result = run_experiment(config, out_dir);
  json report = seed_variance(result.runs);
  report["run_id"] = run_id(config);
  if (!out_dir.empty()) write_json(fs::path(out_dir) / "variance.json", report);
  return report;
}

std::vector<WindowRow> read_csv_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("windows.csv: unexpected header");
  std::vector<WindowRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 4 + kMetricNames.size()) throw std::runtime_error("windows.csv: wrong column count on line " + std::to_string(lineno));
    WindowRow r;
    try {
      r.seed = std::stoull(cells[1]);
      r.phase = cells[2];
      r.index = std::stoull(cells[3]);
      for (std::size_t m = 0; m < kMetricNames.size(); ++m) r.metrics.push_back(std::stod(cells[4 + m]));
    } catch (const std::exception&) {
      throw std::runtime_error("windows.csv: bad number on line " + std::to_string(lineno));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

json report_directory(const std::string& out_dir) {
  const fs::path csv_path = fs::path(out_dir) / "windows.csv";
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot read " + csv_path.string());
  const auto rows = read_csv_rows(in);

  json summary = json::object();
  const fs::path summary_path = fs::path(out_dir) / "summary.json";
  if (std::ifstream old(summary_path); old) {
    try {
      summary = json::parse(old);
    } catch (const json::exception&) {
      summary = json::object();
    }
  }
  std::vector<std::uint64_t> seeds;
  for (const auto& r : rows) {
    if (std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) seeds.push_back(r.seed);
  }
  in.clear();
  in.seekg(0);
  std::string header, first;
  std::getline(in, header);
  if (std::getline(in, first) && !first.empty()) summary["run_id"] = split(first, ',').at(0);
  summary["seeds"] = seeds;
  summary["phases"] = aggregate_phases(rows);
  write_json(summary_path, summary);
  return summary;
}

}  // namespace rlcache
