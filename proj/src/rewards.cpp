#include "rlcache/rewards.hpp"

#include <cmath>
#include <stdexcept>

#include "rlcache/errors.hpp"

namespace rlcache {

namespace {

void require_terminal(const IncompleteExperience& e) {
  if (e.termination == TerminationReason::Active) throw PreconditionError("reward requested for an active experience");
}

}  // namespace

double admission_reward(const IncompleteExperience& e, bool cached, const AdmissionRewardConfig& config) {
  require_terminal(e);
  double reward;
  if (cached) reward = e.hit_count > 0 ? static_cast<double>(e.hit_count) : -1.0;
  else reward = e.termination == TerminationReason::Miss ? -1.0 : 1.0;
  if (reward > 0.0) {
    if (config.scale_by_retrieval && config.mean_retrieval > 0.0) reward *= e.retrieval_time / config.mean_retrieval;
    if (config.scale_by_hit_density && e.size > 0.0) reward *= static_cast<double>(e.hit_count) / e.size;
  }
  return reward;
}

double eviction_reward(const IncompleteExperience& e, DecisionKind decision) {
  require_terminal(e);
  switch (decision) {
    case DecisionKind::Evict: return e.termination == TerminationReason::Miss ? -1.0 : 1.0;
    case DecisionKind::Keep: return e.hit_count > 0 ? 1.0 : -1.0;
  }
  throw std::invalid_argument("eviction_reward: unknown decision");
}

double ttl_reward(const IncompleteExperience& e, double estimated_ttl, double utilization, double max_ttl) {
  require_terminal(e);
  if (e.termination == TerminationReason::Invalidated) {
    const double lifetime = e.completed_at - e.created_at;
    return -(1.0 + std::abs(estimated_ttl - lifetime) / max_ttl);
  }
  return static_cast<double>(e.hit_count) * (1.0 + (1.0 - utilization));
}

double multitask_reward(MultiTaskEvent event) {
  switch (event) {
    case MultiTaskEvent::Hit: return 1.0;
    case MultiTaskEvent::CorrectEviction:
    case MultiTaskEvent::CorrectNotCache: return 10.0;
    case MultiTaskEvent::Miss:
    case MultiTaskEvent::Invalidate: return -10.0;
  }
  throw std::invalid_argument("multitask_reward: unknown event");
}

double multitask_experience_reward(const IncompleteExperience& e, MultiTaskDecision decision) {
  require_terminal(e);
  const double hits = static_cast<double>(e.hit_count) * multitask_reward(MultiTaskEvent::Hit);
  const bool missed = e.termination == TerminationReason::Miss;
  switch (decision) {
    case MultiTaskDecision::NoCache:
      return multitask_reward(missed ? MultiTaskEvent::Miss : MultiTaskEvent::CorrectNotCache);
    case MultiTaskDecision::Evict:
      return multitask_reward(missed ? MultiTaskEvent::Miss : MultiTaskEvent::CorrectEviction);
    case MultiTaskDecision::Cache:
    case MultiTaskDecision::Keep:
      if (missed) return hits + multitask_reward(MultiTaskEvent::Miss);
      if (e.termination == TerminationReason::Invalidated) return hits + multitask_reward(MultiTaskEvent::Invalidate);
      return hits;
  }
  throw std::invalid_argument("multitask_experience_reward: unknown decision");
}

}  // namespace rlcache
