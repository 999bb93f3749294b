#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rlcache/backend.hpp"
#include "rlcache/clock.hpp"
#include "rlcache/dqn.hpp"
#include "rlcache/rewards.hpp"
#include "rlcache/sac.hpp"
#include "rlcache/workload.hpp"

namespace rlcache {

struct ExperimentConfig {
  std::string name = "experiment";
  // Slot strategies, or multitask = true to let one agent fill all three.
  std::string admission = "write_through";  // write_through | write_on_read | rl_admission
  std::string eviction = "lru";             // lru | lfu | fifo | rl_eviction
  std::string ttl = "fixed_ttl";            // fixed_ttl | rl_ttl
  bool multitask = false;

  std::size_t capacity = 5000;
  double max_ttl = 120.0;
  double fixed_ttl = 60.0;
  double cache_threshold = 1.0;
  std::size_t record_count = 10000;
  std::size_t window_size = 1000;
  std::vector<WorkloadSpec> phases;

  std::vector<std::uint64_t> seeds{1};

  ClockMode clock = ClockMode::Virtual;
  double ops_per_second = 100.0;
  LatencyModel latency;

  DqnConfig dqn;
  SacConfig sac;
  AdmissionRewardConfig rewards;
  int embedding_dim = 16;
  std::size_t max_keys = 16384;

  std::string output_dir;

  ExperimentConfig();
  bool uses_rl() const;
};

// Named bases: five_phase, full_scale, robustness, epsilon_evaluation,
// epsilon_hyperparameters. Throws ConfigError for other names.
ExperimentConfig config_preset(const std::string& name);
std::vector<std::string> config_preset_names();

// Parses and validates; every failure is a ConfigError naming the JSON path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Throws ConfigError on inconsistent values.
void validate(const ExperimentConfig& config);

// Fully resolved configuration; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);
// FNV-1a over the canonical dump of to_json.
std::uint64_t config_hash(const ExperimentConfig& config);

// Multiplies every phase's query count (at least 1 query per phase).
void apply_scale(ExperimentConfig& config, double scale);

}  // namespace rlcache
