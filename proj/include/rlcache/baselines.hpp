#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "rlcache/observer.hpp"
#include "rlcache/types.hpp"

namespace rlcache {

enum class EvictionPolicyKind { LRU, LFU, FIFO };
enum class AdmissionPolicyKind { WriteThrough, WriteOnRead };

const char* to_string(EvictionPolicyKind kind);
const char* to_string(AdmissionPolicyKind kind);
// Throws std::invalid_argument on names other than lru/lfu/fifo.
EvictionPolicyKind eviction_policy_from_string(std::string_view name);
AdmissionPolicyKind admission_policy_from_string(std::string_view name);

// Write-through stores on writes and on read-miss fetches; write-on-read only
// on read-miss fetches.
bool should_cache(AdmissionPolicyKind policy, OpType op);

// Passthrough of the configured constant; negative values are rejected.
double fixed_ttl(double configured = 60.0);

// Victim ordering for one rule-based policy, maintained incrementally from
// cache observations so a victim is found in O(log n).
//
// Orders: LRU by last access, FIFO by insertion, LFU by hit count and then
// last access. The sequence numbers come from the cache and are unique, so
// every order is total.
class EvictionOrder {
 public:
  explicit EvictionOrder(EvictionPolicyKind kind) : kind_(kind) {}

  EvictionPolicyKind kind() const { return kind_; }

  // Feed every cache observation (WriteSet, Hit, Invalidate, Expire,
  // EvictionDecision); others are ignored.
  void observe(const Observation& obs);

  // Throws PreconditionError when nothing is resident.
  const std::string& victim() const;

  std::size_t size() const { return rank_.size(); }
  bool contains(const std::string& key) const { return rank_.count(key) != 0; }
  std::vector<std::string> keys() const;

 private:
  using Rank = std::tuple<std::uint64_t, std::uint64_t, std::string>;

  Rank rank_of(const std::string& key, const EntryMeta& meta) const;
  void erase(const std::string& key);

  EvictionPolicyKind kind_;
  std::set<Rank> order_;
  std::unordered_map<std::string, Rank> rank_;
};

}  // namespace rlcache
