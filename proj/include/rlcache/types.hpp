#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace rlcache {

// Virtual (or wall) seconds since the start of a run.
using Timestamp = double;

// A result set: ordered field-name / field-value pairs.
using ResultSet = std::vector<std::pair<std::string, std::string>>;

// Sum of the value byte lengths.
std::size_t result_size(const ResultSet& values);

// Fixed-length numeric encoding of an object fed to an agent.
using StateVector = Eigen::VectorXd;

enum class OpType : std::uint8_t { Read = 0, Write = 1, ReadMissFetch = 2 };

struct CacheEntry {
  std::string key;
  ResultSet values;
  std::size_t size = 0;
  double ttl = 0.0;
  Timestamp stored_at = 0.0;
  std::uint64_t hit_count = 0;
  double retrieval_time = 0.0;
  // Monotone sequence numbers; they give LRU and FIFO a total order.
  std::uint64_t insert_seq = 0;
  std::uint64_t access_seq = 0;

  Timestamp deadline() const { return stored_at + ttl; }
};

// Entry metadata carried on observations (the values are left behind).
struct EntryMeta {
  std::size_t size = 0;
  double ttl = 0.0;
  Timestamp stored_at = 0.0;
  std::uint64_t hit_count = 0;
  double retrieval_time = 0.0;
  std::uint64_t insert_seq = 0;
  std::uint64_t access_seq = 0;

  static EntryMeta of(const CacheEntry& e) {
    return {e.size, e.ttl, e.stored_at, e.hit_count, e.retrieval_time, e.insert_seq, e.access_seq};
  }
};

}  // namespace rlcache
