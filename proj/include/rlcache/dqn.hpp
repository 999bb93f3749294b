#pragma once

#include <cstdint>
#include <vector>

#include "rlcache/adam.hpp"
#include "rlcache/mlp.hpp"
#include "rlcache/replay.hpp"
#include "rlcache/rng.hpp"

namespace rlcache {

struct DqnConfig {
  int state_dim = 1;
  std::vector<EmbeddingSpec> embeddings;
  int actions = 2;
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  double lr = 3e-4;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 50000;
  std::uint64_t sync_interval = 500;
  // observe() starts training once the replay holds this many transitions.
  std::size_t warmup = 1000;
  EpsilonSchedule epsilon;
  std::uint64_t seed = 0;
};

// Epsilon-greedy DQN with a periodically synced target network. The cache
// agents only ever produce continuing transitions, so the bootstrap term is
// always present for them.
class DqnAgent {
 public:
  explicit DqnAgent(const DqnConfig& config);

  Eigen::VectorXd q_values(const StateVector& state) const;
  // One column of Q-values per state column.
  Eigen::MatrixXd q_values(const Eigen::MatrixXd& states) const;

  // Lowest index among the maximal Q-values.
  int greedy(const StateVector& state) const;
  static int argmax(const Eigen::VectorXd& q);

  // Epsilon-greedy with epsilon taken from the schedule at `step`.
  int act(const StateVector& state, std::uint64_t step, Rng& rng) const;
  int act_with_epsilon(const StateVector& state, double epsilon, Rng& rng) const;
  // Uses and advances the agent's own decision counter and generator.
  int act(const StateVector& state);
  // Same, for Q-values the caller already computed (batched scans).
  int act_from_q(const Eigen::VectorXd& q);

  // Stores the transition, then runs one train step if the replay is warm.
  // Returns the loss of that step, or a negative value when none ran.
  double observe(Transition t);

  // Mean squared TD error before the update.
  double train_step(const std::vector<const Transition*>& batch);

  std::uint64_t decisions() const { return decisions_; }
  std::uint64_t train_steps() const { return train_steps_; }
  double epsilon() const { return config_.epsilon.value(decisions_); }
  const DqnConfig& config() const { return config_; }
  const ReplayBuffer& replay() const { return replay_; }

  Mlp<double>& online() { return online_; }
  const Mlp<double>& online() const { return online_; }
  const Mlp<double>& target() const { return target_; }
  void sync_target() { target_ = online_; }

 private:
  DqnConfig config_;
  Mlp<double> online_;
  Mlp<double> target_;
  AdamState<double> adam_;
  ReplayBuffer replay_;
  Rng rng_;
  std::uint64_t decisions_ = 0;
  std::uint64_t train_steps_ = 0;
};

}  // namespace rlcache
