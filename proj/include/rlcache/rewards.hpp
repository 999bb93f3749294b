#pragma once

#include <cstdint>

#include "rlcache/metrics.hpp"
#include "rlcache/observer.hpp"

namespace rlcache {

// Both multipliers apply to positive rewards only.
struct AdmissionRewardConfig {
  bool scale_by_retrieval = false;  // x retrieval_time / mean_retrieval
  double mean_retrieval = 0.01;
  bool scale_by_hit_density = false;  // x hit_count / result size
};

// Every reward function takes a finished experience and throws
// PreconditionError for an Active one.

// Cache: +hits, or -1 if never read. NoCache: -1 if the object was asked for
// again (Miss), +1 otherwise.
double admission_reward(const IncompleteExperience& e, bool cached, const AdmissionRewardConfig& config = {});

// Evict: -1 on a later Miss, else +1. Keep: +1 if read while kept, else -1.
double eviction_reward(const IncompleteExperience& e, DecisionKind decision);

// Invalidated: -(1 + |estimate - lifetime| / max_ttl). Otherwise
// hits * (1 + (1 - utilization)), utilization taken at decision time.
double ttl_reward(const IncompleteExperience& e, double estimated_ttl, double utilization, double max_ttl);

enum class MultiTaskEvent : std::uint8_t { Hit, Miss, Invalidate, CorrectEviction, CorrectNotCache };
enum class MultiTaskDecision : std::uint8_t { Cache, NoCache, Evict, Keep };

// +1 per hit, +10 per correct eviction or correct not-cache, -10 per miss or
// invalidation. Throws std::invalid_argument for unknown events.
double multitask_reward(MultiTaskEvent event);

// Sum of the event rewards one decision collected over its lifetime.
double multitask_experience_reward(const IncompleteExperience& e, MultiTaskDecision decision);

}  // namespace rlcache
