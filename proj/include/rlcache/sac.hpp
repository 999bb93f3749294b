#pragma once

#include <cstdint>
#include <vector>

#include "rlcache/adam.hpp"
#include "rlcache/mlp.hpp"
#include "rlcache/replay.hpp"
#include "rlcache/rng.hpp"

namespace rlcache {

struct SacConfig {
  int state_dim = 1;
  std::vector<EmbeddingSpec> embeddings;
  Eigen::VectorXd low = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd high = Eigen::VectorXd::Ones(1);
  std::vector<int> hidden{128, 128, 128};
  double gamma = 0.99;
  double lr = 3e-4;
  double alpha = 0.2;
  double tau = 0.005;
  std::size_t batch_size = 64;
  std::size_t replay_capacity = 50000;
  std::size_t warmup = 64;
  std::uint64_t seed = 0;
};

// Soft actor-critic with a tanh-squashed Gaussian policy, twin critics with
// Polyak-averaged targets, and a fixed entropy temperature.
//
// Transitions carry actions in environment units ([low, high]); the critics
// see them rescaled to [-1, 1].
class SacAgent {
 public:
  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;

  explicit SacAgent(const SacConfig& config);

  int action_dim() const { return static_cast<int>(config_.low.size()); }

  Eigen::VectorXd act(const StateVector& state, bool deterministic, Rng& rng) const;
  // Uses the agent's own generator.
  Eigen::VectorXd act(const StateVector& state, bool deterministic = false);
  // One action column per state column, noise drawn column by column.
  Eigen::MatrixXd act_batch(const Eigen::MatrixXd& states, bool deterministic = false);

  // Raw policy head for one state: (mean, clamped log-std) per dimension.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> policy_head(const StateVector& state) const;

  // Stores the transition and trains once if the replay is warm. Returns
  // whether a train step ran.
  bool observe(Transition t);

  struct Losses {
    double critic = 0.0;
    double actor = 0.0;
  };
  Losses train_step(const std::vector<const Transition*>& batch);

  // min(Q1, Q2) for environment-unit actions.
  double q_value(const StateVector& state, const Eigen::VectorXd& action) const;

  Eigen::VectorXd to_unit(const Eigen::VectorXd& action) const;
  Eigen::VectorXd from_unit(const Eigen::VectorXd& unit) const;

  std::uint64_t train_steps() const { return train_steps_; }
  const SacConfig& config() const { return config_; }
  const ReplayBuffer& replay() const { return replay_; }

  Mlp<double>& actor() { return actor_; }
  const Mlp<double>& actor() const { return actor_; }
  Mlp<double>& critic(int i) { return critics_[i]; }
  const Mlp<double>& critic(int i) const { return critics_[i]; }
  // Materialises the lazily averaged embedding columns first.
  const Mlp<double>& target_critic(int i);

 private:
  struct PolicySample {
    Eigen::MatrixXd mean, log_std, clamped, noise, unit;  // k x B each; clamped = 1 where log_std hit a bound
    Eigen::RowVectorXd log_prob;
  };

  PolicySample sample_policy(const Eigen::MatrixXd& out, Rng& rng) const;
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& unit_actions) const;
  // Target embedding columns only move towards the critic's while it stays
  // put, so each column is averaged on demand: k pending steps collapse to
  // t = s + (1 - tau)^k (t - s). Dense layers are averaged every step.
  void catch_up_targets(const Eigen::MatrixXd& states);
  void catch_up_all_targets();

  SacConfig config_;
  Mlp<double> actor_;
  Mlp<double> critics_[2];
  Mlp<double> targets_[2];
  AdamState<double> actor_opt_;
  AdamState<double> critic_opt_[2];
  ReplayBuffer replay_;
  Rng rng_;
  std::uint64_t train_steps_ = 0;
  std::vector<std::vector<std::uint64_t>> synced_;  // per embedding, per column: polyak steps applied
  std::uint64_t polyak_steps_ = 0;
};

}  // namespace rlcache
