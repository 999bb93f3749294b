#include "rlcache/cache.hpp"

#include <algorithm>
#include <stdexcept>

namespace rlcache {

Cache::Cache(std::size_t capacity, Observer* observer) : capacity_(capacity), observer_(observer) {
  if (capacity == 0) throw std::invalid_argument("cache capacity must be positive");
}

void Cache::announce(ObservationKind kind, const std::string& key, Timestamp now, const CacheEntry* entry) {
  if (observer_ == nullptr) return;
  Observation obs{kind, key, now, std::nullopt};
  if (entry != nullptr) obs.entry = EntryMeta::of(*entry);
  observer_->emit(std::move(obs));
}

CacheEntry Cache::remove(std::unordered_map<std::string, CacheEntry>::iterator it) {
  heap_.erase(it->first);
  CacheEntry out = std::move(it->second);
  entries_.erase(it);
  return out;
}

std::optional<CacheEntry> Cache::get(const std::string& key, Timestamp now) {
  auto it = entries_.find(key);
  if (it != entries_.end() && it->second.deadline() <= now) {
    CacheEntry dead = remove(it);
    announce(ObservationKind::Expire, key, now, &dead);
    it = entries_.end();
  }
  if (it == entries_.end()) {
    announce(ObservationKind::Miss, key, now, nullptr);
    return std::nullopt;
  }
  CacheEntry& e = it->second;
  ++e.hit_count;
  e.access_seq = ++seq_;
  announce(ObservationKind::Hit, key, now, &e);
  return e;
}

PutStatus Cache::put(const std::string& key, ResultSet values, double ttl, Timestamp now, double retrieval_time) {
  if (!(ttl >= 0.0)) throw std::invalid_argument("put: ttl must be non-negative");
  auto it = entries_.find(key);
  if (it == entries_.end() && entries_.size() >= capacity_) return PutStatus::RejectedFull;
  CacheEntry e;
  e.key = key;
  e.size = result_size(values);
  e.values = std::move(values);
  e.ttl = ttl;
  e.stored_at = now;
  e.hit_count = 0;
  e.retrieval_time = retrieval_time;
  e.insert_seq = ++seq_;
  e.access_seq = e.insert_seq;
  heap_.push(key, e.deadline());
  auto& slot = entries_[key];
  slot = std::move(e);
  announce(ObservationKind::WriteSet, key, now, &slot);
  return PutStatus::Stored;
}

std::optional<CacheEntry> Cache::invalidate(const std::string& key, Timestamp now) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    announce(ObservationKind::Invalidate, key, now, nullptr);
    return std::nullopt;
  }
  CacheEntry removed = remove(it);
  announce(ObservationKind::Invalidate, key, now, &removed);
  return removed;
}

std::optional<CacheEntry> Cache::evict(const std::string& key, Timestamp now) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  CacheEntry removed = remove(it);
  announce(ObservationKind::EvictionDecision, key, now, &removed);
  return removed;
}

std::vector<CacheEntry> Cache::sweep_expired(Timestamp now) {
  std::vector<CacheEntry> out;
  while (!heap_.empty() && heap_.top().deadline <= now) {
    const std::string key = heap_.top().key;
    out.push_back(remove(entries_.find(key)));
    announce(ObservationKind::Expire, key, now, &out.back());
  }
  return out;
}

const CacheEntry* Cache::peek(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<const CacheEntry*> Cache::sorted_entries() const {
  std::vector<const CacheEntry*> out;
  out.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) out.push_back(&entry);
  std::sort(out.begin(), out.end(), [](const CacheEntry* a, const CacheEntry* b) { return a->key < b->key; });
  return out;
}

const CacheEntry* Cache::lru_entry() const {
  const CacheEntry* best = nullptr;
  for (const auto& [key, entry] : entries_) {
    if (best == nullptr || entry.access_seq < best->access_seq) best = &entry;
  }
  return best;
}

}  // namespace rlcache
