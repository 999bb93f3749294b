#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlcache/deadline_heap.hpp"
#include "rlcache/observer.hpp"
#include "rlcache/types.hpp"

namespace rlcache {

enum class PutStatus { Stored, RejectedFull };

// Capacity-bounded key-value cache with per-entry TTL.
//
// An entry is dead from stored_at + ttl onwards: get() at or after the
// deadline expires it lazily (an Expire observation for the entry followed by
// a Miss for the request). put() on a full cache never evicts; it reports
// RejectedFull and leaves victim selection to the caller.
//
// Every state change is announced on the attached observer, if any.
class Cache {
 public:
  explicit Cache(std::size_t capacity, Observer* observer = nullptr);

  std::optional<CacheEntry> get(const std::string& key, Timestamp now);
  PutStatus put(const std::string& key, ResultSet values, double ttl, Timestamp now, double retrieval_time = 0.0);
  // Emits Invalidate whether or not the key is resident.
  std::optional<CacheEntry> invalidate(const std::string& key, Timestamp now);
  // Removal on behalf of an eviction strategy; emits EvictionDecision.
  std::optional<CacheEntry> evict(const std::string& key, Timestamp now);
  // Removes and returns every entry whose deadline is at or before now, in
  // deadline order.
  std::vector<CacheEntry> sweep_expired(Timestamp now);

  // Side-effect free lookup (no hit accounting, no expiry).
  const CacheEntry* peek(const std::string& key) const;
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }

  double utilization() const { return static_cast<double>(entries_.size()) / static_cast<double>(capacity_); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return entries_.size() >= capacity_; }

  const std::unordered_map<std::string, CacheEntry>& entries() const { return entries_; }
  const DeadlineHeap& expiry_heap() const { return heap_; }

  // Entries sorted by key, for deterministic iteration.
  std::vector<const CacheEntry*> sorted_entries() const;

  // Least recently used resident entry (insertion counts as use).
  const CacheEntry* lru_entry() const;

 private:
  void announce(ObservationKind kind, const std::string& key, Timestamp now, const CacheEntry* entry);
  CacheEntry remove(std::unordered_map<std::string, CacheEntry>::iterator it);

  std::size_t capacity_;
  Observer* observer_;
  std::unordered_map<std::string, CacheEntry> entries_;
  DeadlineHeap heap_;
  std::uint64_t seq_ = 0;
};

}  // namespace rlcache
