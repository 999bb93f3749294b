#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlcache/baselines.hpp"
#include "rlcache/cache.hpp"
#include "rlcache/dqn.hpp"
#include "rlcache/key_encoder.hpp"
#include "rlcache/observer.hpp"
#include "rlcache/rewards.hpp"
#include "rlcache/sac.hpp"
#include "rlcache/state.hpp"
#include "rlcache/strategy.hpp"

namespace rlcache {

// ---- rule-based strategies -------------------------------------------------

class BaselineAdmission : public AdmissionStrategy {
 public:
  explicit BaselineAdmission(AdmissionPolicyKind kind) : kind_(kind) {}
  bool should_cache(const Request& req, double) override { return rlcache::should_cache(kind_, req.op); }

 private:
  AdmissionPolicyKind kind_;
};

class FixedTtl : public TtlStrategy {
 public:
  explicit FixedTtl(double ttl = 60.0) : ttl_(fixed_ttl(ttl)) {}
  double ttl_for(const Request&) override { return ttl_; }

 private:
  double ttl_;
};

// LRU / LFU / FIFO: one victim per round, from an observation-fed order.
class BaselineEviction : public EvictionStrategy {
 public:
  BaselineEviction(EvictionPolicyKind kind, Observer& observer);
  ~BaselineEviction() override;
  std::vector<std::string> select_victims(const Cache& cache, Timestamp now) override;
  const EvictionOrder& order() const { return order_; }

 private:
  EvictionOrder order_;
  Observer& observer_;
  SubscriberId id_;
};

// ---- learning strategies ---------------------------------------------------

struct RlSettings {
  double max_ttl = 120.0;
  FeatureScales scales;  // scales.max_ttl is overwritten with max_ttl
  std::size_t max_keys = KeyEncoder::kDefaultMaxKeys;
  int embedding_dim = 16;
  std::uint64_t seed = 0;
};

// Shared plumbing: dictionaries, per-key outcome history, observer namespaces.
class AgentBase {
 public:
  AgentBase(Observer& observer, const Cache& cache, const RlSettings& settings);
  virtual ~AgentBase();
  AgentBase(const AgentBase&) = delete;
  AgentBase& operator=(const AgentBase&) = delete;

  std::uint64_t decisions() const { return decisions_; }
  std::uint64_t rewards() const { return rewards_; }
  double reward_sum() const { return reward_sum_; }
  // Decisions that could not be tracked because one was already pending.
  std::uint64_t untracked() const { return untracked_; }
  const RlSettings& settings() const { return settings_; }

 protected:
  SubscriberId subscribe(InterestSet interests);
  ObjectFeatures features(const Request& req);
  ObjectFeatures features(const CacheEntry& entry);
  int value_index(const ResultSet& values);
  void track(SubscriberId ns, IncompleteExperience e, double watch);
  void count_reward(double r) {
    ++rewards_;
    reward_sum_ += r;
  }

  // Completion or expiry of an experience tracked in namespace `ns`.
  virtual void finished(SubscriberId ns, const IncompleteExperience& e) = 0;

  Observer& observer_;
  const Cache& cache_;
  RlSettings settings_;
  KeyEncoder keys_;
  KeyEncoder values_;
  KeyHistory history_;
  std::uint64_t decisions_ = 0;

 private:
  std::vector<SubscriberId> subscriptions_;
  std::uint64_t rewards_ = 0;
  double reward_sum_ = 0.0;
  std::uint64_t untracked_ = 0;
};

InterestSet lifecycle_interests();

// DQN admission: cache (1) or not (0) each written / fetched object.
class AdmissionAgent : public AgentBase, public AdmissionStrategy {
 public:
  AdmissionAgent(Observer& observer, const Cache& cache, const RlSettings& settings, DqnConfig dqn, AdmissionRewardConfig reward = {});

  bool should_cache(const Request& req, double ttl) override;
  void on_decision(const Request& req, bool cached, double ttl) override;

  StateVector encode(const Request& req, double ttl);
  // Epsilon-greedy choice for an encoded state; advances the schedule.
  int decide(const StateVector& state);
  DqnAgent& dqn() { return dqn_; }
  std::uint64_t cache_decisions() const { return cache_decisions_; }

 private:
  void finished(SubscriberId ns, const IncompleteExperience& e) override;

  DqnAgent dqn_;
  AdmissionRewardConfig reward_;
  SubscriberId ns_;
  StateVector pending_state_;
  int pending_action_ = 0;
  std::uint64_t cache_decisions_ = 0;
};

// DQN eviction: every resident is a separate keep (0) / evict (1) decision.
class EvictionAgent : public AgentBase, public EvictionStrategy {
 public:
  EvictionAgent(Observer& observer, const Cache& cache, const RlSettings& settings, DqnConfig dqn);

  std::vector<std::string> select_victims(const Cache& cache, Timestamp now) override;
  void on_evicted(const std::vector<CacheEntry>& victims, const Cache& cache, Timestamp now) override;

  StateVector encode(const CacheEntry& entry);
  DqnAgent& dqn() { return dqn_; }
  std::uint64_t fallbacks() const { return fallbacks_; }
  std::size_t pending_decisions() const { return observer_.tracked_count(ns_); }

 private:
  struct Scanned {
    std::string key;
    StateVector state;
    DecisionKind decision;
    double deadline;
    double size;
    double retrieval_time;
  };
  void finished(SubscriberId ns, const IncompleteExperience& e) override;

  DqnAgent dqn_;
  SubscriberId ns_;
  std::vector<Scanned> scan_;
  std::uint64_t fallbacks_ = 0;
};

// SAC TTL estimation. Entries removed early by the eviction policy are moved
// to a monitoring namespace and judged by whether they get invalidated before
// max_ttl has passed since the decision.
class TtlAgent : public AgentBase, public TtlStrategy {
 public:
  TtlAgent(Observer& observer, const Cache& cache, const RlSettings& settings, SacConfig sac);

  double ttl_for(const Request& req) override;
  void on_decision(const Request& req, bool cached, double ttl) override;

  StateVector encode(const Request& req);
  SacAgent& sac() { return sac_; }
  std::size_t monitored() const { return observer_.tracked_count(monitor_); }

 private:
  void finished(SubscriberId ns, const IncompleteExperience& e) override;
  void learn(const IncompleteExperience& e);

  SacAgent sac_;
  SubscriberId ns_;
  SubscriberId monitor_;
  StateVector pending_state_;
  double pending_ttl_ = 0.0;
};

// One SAC policy emitting (evict score in [0, 1], ttl in [0, max_ttl]) that
// fills all three slots: admission is ttl > threshold, eviction is
// round(score) == 1.
class MultiTaskAgent : public AgentBase, public AdmissionStrategy, public TtlStrategy, public EvictionStrategy {
 public:
  MultiTaskAgent(Observer& observer, const Cache& cache, const RlSettings& settings, SacConfig sac, double cache_threshold = 1.0);

  double ttl_for(const Request& req) override;
  bool should_cache(const Request& req, double ttl) override;
  void on_decision(const Request& req, bool cached, double ttl) override;
  std::vector<std::string> select_victims(const Cache& cache, Timestamp now) override;
  void on_evicted(const std::vector<CacheEntry>& victims, const Cache& cache, Timestamp now) override;

  // Pure decision rules.
  static bool admits(double ttl_estimate, double threshold) { return ttl_estimate > threshold; }
  static bool evicts(double evict_score) { return std::lround(evict_score) == 1; }

  StateVector encode(const Request& req);
  StateVector encode(const CacheEntry& entry);
  SacAgent& sac() { return sac_; }
  double threshold() const { return threshold_; }

 private:
  struct Scanned {
    std::string key;
    StateVector state;
    Eigen::VectorXd action;
    bool evict;
    double deadline;
  };
  void finished(SubscriberId ns, const IncompleteExperience& e) override;

  SacAgent sac_;
  double threshold_;
  SubscriberId admission_ns_;
  SubscriberId eviction_ns_;
  StateVector pending_state_;
  Eigen::VectorXd pending_action_;
  std::vector<Scanned> scan_;
};

}  // namespace rlcache
