#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "rlcache/agents.hpp"
#include "rlcache/backend.hpp"
#include "rlcache/cache.hpp"
#include "rlcache/clock.hpp"
#include "rlcache/config.hpp"
#include "rlcache/metrics.hpp"
#include "rlcache/observer.hpp"
#include "rlcache/workload.hpp"

namespace rlcache {

struct ReadResult {
  bool found = false;  // false: the backend has never seen the key
  bool hit = false;
  ResultSet values;
};

// One cache with its strategies, backend and metrics, driven one client
// request at a time. Single owner, not thread safe.
//
// Every request first advances the clock; each whole virtual second passed
// on the way runs the expiry sweep of the cache and of the observer.
class CacheManager {
 public:
  // Loads record_count records into the backend (seeded by `seed`).
  CacheManager(const ExperimentConfig& config, std::uint64_t seed);
  ~CacheManager();
  CacheManager(const CacheManager&) = delete;
  CacheManager& operator=(const CacheManager&) = delete;

  void begin_phase(const std::string& name) { ledger_.begin_phase(name); }

  ReadResult read(const std::string& key);
  void write(const std::string& key, ResultSet values);
  // Client-side invalidation without a new value.
  void remove(const std::string& key);
  void apply(const Operation& op);

  // Closes the last window and every open TTL record.
  void finish();

  const MetricsLedger& ledger() const { return ledger_; }
  const Cache& cache() const { return cache_; }
  const Backend& backend() const { return backend_; }
  const Observer& observer() const { return observer_; }
  Timestamp now() const { return clock_.now(); }
  std::uint64_t requests() const { return requests_; }
  std::uint64_t eviction_rounds() const { return eviction_rounds_; }

  // Null unless the slot is filled by that agent.
  AdmissionAgent* admission_agent() { return admission_agent_.get(); }
  EvictionAgent* eviction_agent() { return eviction_agent_.get(); }
  TtlAgent* ttl_agent() { return ttl_agent_.get(); }
  MultiTaskAgent* multitask_agent() { return multitask_.get(); }

 private:
  Timestamp advance();
  void decide_and_store(const std::string& key, const ResultSet& values, OpType op, double retrieval_time, Timestamp now,
                        bool& committed);

  ExperimentConfig config_;
  Clock clock_;
  Backend backend_;
  // Declared before everything that subscribes to it.
  Observer observer_;
  Cache cache_;
  MetricsLedger ledger_;
  EvictionAudit audit_;

  std::unique_ptr<BaselineAdmission> baseline_admission_;
  std::unique_ptr<FixedTtl> fixed_ttl_;
  std::unique_ptr<BaselineEviction> baseline_eviction_;
  std::unique_ptr<AdmissionAgent> admission_agent_;
  std::unique_ptr<EvictionAgent> eviction_agent_;
  std::unique_ptr<TtlAgent> ttl_agent_;
  std::unique_ptr<MultiTaskAgent> multitask_;

  AdmissionStrategy* admission_ = nullptr;
  TtlStrategy* ttl_ = nullptr;
  EvictionStrategy* eviction_ = nullptr;

  std::int64_t swept_second_ = -1;
  std::uint64_t requests_ = 0;
  std::uint64_t eviction_rounds_ = 0;
};

}  // namespace rlcache
