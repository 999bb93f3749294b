#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "rlcache/types.hpp"

namespace rlcache {

// Per-key retrieval delay: a constant drawn once from
// log-normal(ln(median), sigma), seeded by (backend seed, key).
struct LatencyModel {
  double median = 0.01;
  double sigma = 0.5;
};

struct BackendRead {
  ResultSet values;
  double retrieval_time = 0.0;
};

// The simulated persistent store behind the cache.
class Backend {
 public:
  explicit Backend(std::uint64_t seed = 0, LatencyModel model = {}) : seed_(seed), model_(model) {}

  // Inserts or replaces a record. New keys get their latency drawn here.
  void write(const std::string& key, ResultSet values);

  // Throws NotFoundError for keys that were never written.
  BackendRead read(const std::string& key) const;

  bool contains(const std::string& key) const { return records_.count(key) != 0; }
  std::size_t size() const { return records_.size(); }
  std::uint64_t seed() const { return seed_; }
  const LatencyModel& latency_model() const { return model_; }

  static double latency_for(const std::string& key, std::uint64_t seed, const LatencyModel& model);

 private:
  struct Record {
    ResultSet values;
    double latency;
  };

  std::uint64_t seed_;
  LatencyModel model_;
  std::unordered_map<std::string, Record> records_;
};

}  // namespace rlcache
