#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rlcache/backend.hpp"
#include "rlcache/rng.hpp"
#include "rlcache/types.hpp"

namespace rlcache {

enum class DistributionKind { Hotspot, Zipfian, Uniform, Periodic };

const char* to_string(DistributionKind kind);
DistributionKind distribution_from_string(std::string_view name);

struct Distribution {
  DistributionKind kind = DistributionKind::Hotspot;
  double hot_fraction = 0.2;      // hotspot: share of the keyspace that is hot
  double hot_opn_fraction = 0.8;  // hotspot: share of operations hitting it
  double theta = 0.99;            // zipfian skew
  // periodic: every key is rewritten once per period (virtual seconds), the
  // writes evenly staggered; all other operations read a uniform key.
  double period = 40.0;
};

struct WorkloadSpec {
  std::string name = "read_mostly";
  double read_fraction = 0.95;
  std::size_t record_count = 10000;
  std::size_t query_count = 10000;
  Distribution distribution;

  double write_fraction() const { return 1.0 - read_fraction; }
  // Throws std::invalid_argument when fractions or counts are out of range.
  void validate() const;
};

// The five read/write mixes, by name (read_only, read_mostly, read_dominant,
// mix, write_heavy). Throws std::invalid_argument for other names.
WorkloadSpec workload_preset(std::string_view name);
std::vector<std::string> workload_preset_names();

struct Operation {
  OpType kind = OpType::Read;  // Read or Write
  std::string key;
  ResultSet values;  // writes only
  std::uint64_t step = 0;
};

std::string record_key(std::size_t index);

// 10 fields of 100 random alphanumeric bytes.
ResultSet random_record(Rng& rng);

// Inserts user0..user{n-1} with seeded random records; returns n.
std::size_t load_phase(std::size_t record_count, std::uint64_t seed, Backend& backend);

// Exact inverse-CDF sampler for P(i) proportional to 1/(i+1)^theta.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double theta);
  std::size_t sample(Rng& rng) const;
  double pmf(std::size_t i) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

// Deterministic operation stream for one phase.
class WorkloadGenerator {
 public:
  WorkloadGenerator(WorkloadSpec spec, std::uint64_t seed, double ops_per_second = 100.0);

  Operation next();
  std::size_t key_index();  // one draw from the key distribution
  bool done() const { return step_ >= spec_.query_count; }
  std::uint64_t step() const { return step_; }
  const WorkloadSpec& spec() const { return spec_; }

 private:
  WorkloadSpec spec_;
  Rng rng_;
  ZipfSampler zipf_;
  double ops_per_second_;
  std::uint64_t step_ = 0;
};

}  // namespace rlcache
