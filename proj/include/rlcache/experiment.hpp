#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rlcache/config.hpp"
#include "rlcache/metrics.hpp"

namespace rlcache {

// Metric columns shared by the CSV, the summary and the report.
inline const std::vector<std::string> kMetricNames{"hit_rate",  "caching_rate",       "precision",  "recall",
                                                   "f1",        "mean_ttl_deviation", "utilization"};

struct WindowRow {
  std::uint64_t seed = 0;
  std::string phase;
  std::size_t index = 0;
  std::vector<double> metrics;  // in kMetricNames order
};

std::vector<WindowRow> window_rows(std::uint64_t seed, const std::vector<WindowStats>& windows);

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<WindowStats> windows;
  double wall_seconds = 0.0;
};

// Load phase, then every workload phase in order, for one seed. The workload
// stream of phase i is seeded by (seed, i), independent of the strategies.
SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed);

std::string run_id(const ExperimentConfig& config);

// Per phase (in first-seen order): the per-seed mean of each metric over the
// phase's windows, then mean and population std of those across seeds.
nlohmann::json aggregate_phases(const std::vector<WindowRow>& rows);

struct ExperimentResult {
  std::vector<SeedRun> runs;
  nlohmann::json summary;
};

// Runs every configured seed. With a non-empty out_dir, writes windows.csv
// as it goes and summary.json last, so a missing summary flags a partial run.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir = "");

// Cross-seed std of the hit rate per window, and the mean of that std over
// the first and last 10% of windows (at least one window each). Throws
// std::invalid_argument for fewer than two seeds. Writes variance.json when
// out_dir is non-empty.
nlohmann::json repeat_and_report(ExperimentConfig config, const std::vector<std::uint64_t>& seeds, const std::string& out_dir = "");
nlohmann::json seed_variance(const std::vector<SeedRun>& runs);

// Re-reads out_dir/windows.csv and rewrites out_dir/summary.json from it.
nlohmann::json report_directory(const std::string& out_dir);
std::vector<WindowRow> read_csv_rows(std::istream& in);

}  // namespace rlcache
