#pragma once

#include <string>
#include <vector>

#include "rlcache/cache.hpp"
#include "rlcache/types.hpp"

namespace rlcache {

// An object the cache manager is deciding about: a write, or a read miss
// that has just been fetched from the backend.
struct Request {
  std::string key;
  OpType op = OpType::ReadMissFetch;
  const ResultSet* values = nullptr;
  std::size_t size = 0;
  double retrieval_time = 0.0;
  Timestamp now = 0.0;
};

// Per decision the manager calls ttl_for, then should_cache, then (after the
// put went through) on_decision on both.
class TtlStrategy {
 public:
  virtual ~TtlStrategy() = default;
  virtual double ttl_for(const Request& req) = 0;
  virtual void on_decision(const Request&, bool /*cached*/, double /*ttl*/) {}
};

class AdmissionStrategy {
 public:
  virtual ~AdmissionStrategy() = default;
  virtual bool should_cache(const Request& req, double ttl) = 0;
  virtual void on_decision(const Request&, bool /*cached*/, double /*ttl*/) {}
};

// Invoked when a put was rejected because the cache is full.
class EvictionStrategy {
 public:
  virtual ~EvictionStrategy() = default;
  // Keys to remove; must be non-empty and resident.
  virtual std::vector<std::string> select_victims(const Cache& cache, Timestamp now) = 0;
  // After the victims are gone and their observations were dispatched.
  virtual void on_evicted(const std::vector<CacheEntry>& /*victims*/, const Cache& /*cache*/, Timestamp /*now*/) {}
};

}  // namespace rlcache
