#include "rlcache/dqn.hpp"

#include <stdexcept>

namespace rlcache {

DqnAgent::DqnAgent(const DqnConfig& config)
    : config_(config),
      online_(config.state_dim, config.hidden, config.actions, config.embeddings),
      replay_(config.replay_capacity, mix_seed(config.seed, 1)),
      rng_(mix_seed(config.seed, 2)) {
  if (config.actions < 1) throw std::invalid_argument("dqn: need at least one action");
  if (config.batch_size == 0 || config.sync_interval == 0) throw std::invalid_argument("dqn: batch size and sync interval must be positive");
  Rng init(mix_seed(config.seed, 0));
  online_.initialize(init);
  target_ = online_;
  adam_.lr = config.lr;
}

Eigen::VectorXd DqnAgent::q_values(const StateVector& state) const {
  return online_.forward(Eigen::MatrixXd(state)).col(0);
}

Eigen::MatrixXd DqnAgent::q_values(const Eigen::MatrixXd& states) const { return online_.forward(states); }

int DqnAgent::argmax(const Eigen::VectorXd& q) {
  int best = 0;
  for (Eigen::Index a = 1; a < q.size(); ++a) {
    if (q(a) > q(best)) best = static_cast<int>(a);
  }
  return best;
}

int DqnAgent::greedy(const StateVector& state) const { return argmax(q_values(state)); }

int DqnAgent::act_with_epsilon(const StateVector& state, double epsilon, Rng& rng) const {
  if (rng.uniform() < epsilon) return static_cast<int>(rng.below(static_cast<std::uint64_t>(config_.actions)));
  return greedy(state);
}

int DqnAgent::act(const StateVector& state, std::uint64_t step, Rng& rng) const {
  return act_with_epsilon(state, config_.epsilon.value(step), rng);
}

int DqnAgent::act(const StateVector& state) { return act(state, decisions_++, rng_); }

int DqnAgent::act_from_q(const Eigen::VectorXd& q) {
  if (q.size() != config_.actions) throw std::invalid_argument("dqn: q vector has the wrong size");
  const double epsilon = config_.epsilon.value(decisions_++);
  if (rng_.uniform() < epsilon) return static_cast<int>(rng_.below(static_cast<std::uint64_t>(config_.actions)));
  return argmax(q);
}

double DqnAgent::observe(Transition t) {
  replay_.push(std::move(t));
  if (replay_.size() < config_.warmup || replay_.size() < config_.batch_size) return -1.0;
  return train_step(replay_.sample(config_.batch_size));
}

double DqnAgent::train_step(const std::vector<const Transition*>& batch) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw std::invalid_argument("dqn: empty batch");
  Eigen::MatrixXd s(config_.state_dim, n), s2(config_.state_dim, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const Transition& t = *batch[b];
    if (t.state.size() != config_.state_dim || t.next_state.size() != config_.state_dim) {
      throw std::invalid_argument("dqn: transition state dimension mismatch");
    }
    s.col(b) = t.state;
    s2.col(b) = t.next_state;
  }
  const Eigen::RowVectorXd next_max = target_.forward(s2).colwise().maxCoeff();

  MlpTape<double> tape;
  const Eigen::MatrixXd q = online_.forward(s, tape);
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), n);
  double loss = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    const Transition& t = *batch[b];
    const int a = static_cast<int>(t.action(0));
    if (a < 0 || a >= config_.actions) throw std::invalid_argument("dqn: action out of range");
    const double y = t.reward + (t.continuing ? config_.gamma * next_max(b) : 0.0);
    const double diff = q(a, b) - y;
    loss += diff * diff;
    dq(a, b) = 2.0 * diff / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);

  adam_step(adam_, online_, online_.backward(tape, s, dq));
  ++train_steps_;
  if (train_steps_ % config_.sync_interval == 0) sync_target();
  return loss;
}

}  // namespace rlcache
