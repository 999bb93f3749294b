#include "rlcache/baselines.hpp"

#include <stdexcept>

#include "rlcache/errors.hpp"

namespace rlcache {

const char* to_string(EvictionPolicyKind kind) {
  switch (kind) {
    case EvictionPolicyKind::LRU: return "lru";
    case EvictionPolicyKind::LFU: return "lfu";
    case EvictionPolicyKind::FIFO: return "fifo";
  }
  return "unknown";
}

const char* to_string(AdmissionPolicyKind kind) {
  return kind == AdmissionPolicyKind::WriteThrough ? "write_through" : "write_on_read";
}

EvictionPolicyKind eviction_policy_from_string(std::string_view name) {
  if (name == "lru") return EvictionPolicyKind::LRU;
  if (name == "lfu") return EvictionPolicyKind::LFU;
  if (name == "fifo") return EvictionPolicyKind::FIFO;
  throw std::invalid_argument("unknown eviction policy '" + std::string(name) + "'");
}

AdmissionPolicyKind admission_policy_from_string(std::string_view name) {
  if (name == "write_through") return AdmissionPolicyKind::WriteThrough;
  if (name == "write_on_read") return AdmissionPolicyKind::WriteOnRead;
  throw std::invalid_argument("unknown admission policy '" + std::string(name) + "'");
}

bool should_cache(AdmissionPolicyKind policy, OpType op) {
  switch (op) {
    case OpType::ReadMissFetch: return true;
    case OpType::Write: return policy == AdmissionPolicyKind::WriteThrough;
    case OpType::Read: return false;
  }
  return false;
}

double fixed_ttl(double configured) {
  if (!(configured >= 0.0)) throw std::invalid_argument("fixed ttl must be non-negative");
  return configured;
}

EvictionOrder::Rank EvictionOrder::rank_of(const std::string& key, const EntryMeta& meta) const {
  switch (kind_) {
    case EvictionPolicyKind::LRU: return {meta.access_seq, 0, key};
    case EvictionPolicyKind::FIFO: return {meta.insert_seq, 0, key};
    case EvictionPolicyKind::LFU: return {meta.hit_count, meta.access_seq, key};
  }
  return {0, 0, key};
}

void EvictionOrder::erase(const std::string& key) {
  auto it = rank_.find(key);
  if (it == rank_.end()) return;
  order_.erase(it->second);
  rank_.erase(it);
}

void EvictionOrder::observe(const Observation& obs) {
  switch (obs.kind) {
    case ObservationKind::WriteSet:
    case ObservationKind::Hit: {
      if (!obs.entry) return;
      erase(obs.key);
      Rank r = rank_of(obs.key, *obs.entry);
      order_.insert(r);
      rank_.emplace(obs.key, std::move(r));
      return;
    }
    case ObservationKind::Invalidate:
    case ObservationKind::Expire:
    case ObservationKind::EvictionDecision:
      erase(obs.key);
      return;
    case ObservationKind::Miss:
      return;
  }
}

const std::string& EvictionOrder::victim() const {
  if (order_.empty()) throw PreconditionError("select_victim: cache is empty");
  return std::get<2>(*order_.begin());
}

std::vector<std::string> EvictionOrder::keys() const {
  std::vector<std::string> out;
  out.reserve(order_.size());
  for (const auto& r : order_) out.push_back(std::get<2>(r));
  return out;
}

}  // namespace rlcache
