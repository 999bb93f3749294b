#include "rlcache/sac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rlcache {

namespace {

constexpr double kSquashEps = 1e-6;

}  // namespace

SacAgent::SacAgent(const SacConfig& config)
    : config_(config),
      actor_(config.state_dim, config.hidden, 2 * static_cast<int>(config.low.size()), config.embeddings),
      replay_(config.replay_capacity, mix_seed(config.seed, 11)),
      rng_(mix_seed(config.seed, 12)) {
  const int k = static_cast<int>(config.low.size());
  if (k == 0 || config.high.size() != k) throw std::invalid_argument("sac: action bounds must be non-empty and equally sized");
  if (!(config.high.array() > config.low.array()).all()) throw std::invalid_argument("sac: high must exceed low");
  if (config.batch_size == 0) throw std::invalid_argument("sac: batch size must be positive");
  Rng init(mix_seed(config.seed, 10));
  actor_.initialize(init);
  for (auto& c : critics_) {
    c = Mlp<double>(config.state_dim + k, config.hidden, 1, config.embeddings);
    c.initialize(init);
  }
  for (int i = 0; i < 2; ++i) targets_[i] = critics_[i];
  for (const auto& e : config.embeddings) synced_.emplace_back(static_cast<std::size_t>(e.vocab), 0);
  actor_opt_.lr = config.lr;
  for (auto& o : critic_opt_) o.lr = config.lr;
}

Eigen::VectorXd SacAgent::to_unit(const Eigen::VectorXd& action) const {
  Eigen::VectorXd u = 2.0 * (action - config_.low).cwiseQuotient(config_.high - config_.low) - Eigen::VectorXd::Ones(action.size());
  return u.cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::VectorXd SacAgent::from_unit(const Eigen::VectorXd& unit) const {
  Eigen::VectorXd a = config_.low + 0.5 * (unit + Eigen::VectorXd::Ones(unit.size())).cwiseProduct(config_.high - config_.low);
  return a.cwiseMax(config_.low).cwiseMin(config_.high);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> SacAgent::policy_head(const StateVector& state) const {
  const int k = action_dim();
  const Eigen::VectorXd out = actor_.forward(Eigen::MatrixXd(state)).col(0);
  return {out.head(k), out.tail(k).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax)};
}

Eigen::VectorXd SacAgent::act(const StateVector& state, bool deterministic, Rng& rng) const {
  auto [mean, log_std] = policy_head(state);
  Eigen::VectorXd u = mean;
  if (!deterministic) {
    for (Eigen::Index j = 0; j < u.size(); ++j) u(j) += std::exp(log_std(j)) * rng.normal();
  }
  return from_unit(u.array().tanh().matrix());
}

Eigen::VectorXd SacAgent::act(const StateVector& state, bool deterministic) { return act(state, deterministic, rng_); }

Eigen::MatrixXd SacAgent::act_batch(const Eigen::MatrixXd& states, bool deterministic) {
  const int k = action_dim();
  const Eigen::MatrixXd out = actor_.forward(states);
  Eigen::MatrixXd actions(k, states.cols());
  for (Eigen::Index b = 0; b < states.cols(); ++b) {
    Eigen::VectorXd u = out.col(b).head(k);
    if (!deterministic) {
      for (int j = 0; j < k; ++j) u(j) += std::exp(std::clamp(out(k + j, b), kLogStdMin, kLogStdMax)) * rng_.normal();
    }
    actions.col(b) = from_unit(u.array().tanh().matrix());
  }
  return actions;
}

SacAgent::PolicySample SacAgent::sample_policy(const Eigen::MatrixXd& out, Rng& rng) const {
  const int k = action_dim();
  const Eigen::Index n = out.cols();
  PolicySample p;
  p.mean = out.topRows(k);
  const Eigen::MatrixXd raw = out.bottomRows(k);
  p.log_std = raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  p.clamped = ((raw.array() < kLogStdMin) || (raw.array() > kLogStdMax)).cast<double>().matrix();
  p.noise.resize(k, n);
  p.unit.resize(k, n);
  p.log_prob = Eigen::RowVectorXd::Zero(n);
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (int j = 0; j < k; ++j) {
      const double eps = rng.normal();
      const double u = p.mean(j, b) + std::exp(p.log_std(j, b)) * eps;
      const double a = std::tanh(u);
      p.noise(j, b) = eps;
      p.unit(j, b) = a;
      p.log_prob(b) += -0.5 * eps * eps - p.log_std(j, b) - half_log_2pi - std::log(1.0 - a * a + kSquashEps);
    }
  }
  return p;
}

Eigen::MatrixXd SacAgent::critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& unit_actions) const {
  Eigen::MatrixXd x(states.rows() + unit_actions.rows(), states.cols());
  x << states, unit_actions;
  return x;
}

void SacAgent::catch_up_targets(const Eigen::MatrixXd& states) {
  const double keep = 1.0 - config_.tau;
  for (std::size_t e = 0; e < config_.embeddings.size(); ++e) {
    const int p = config_.embeddings[e].position;
    for (Eigen::Index b = 0; b < states.cols(); ++b) {
      const auto c = static_cast<std::size_t>(std::lround(states(p, b)));
      if (c >= synced_[e].size()) continue;  // the forward pass reports it
      const std::uint64_t k = polyak_steps_ - synced_[e][c];
      if (k == 0) continue;
      const double w = std::pow(keep, static_cast<double>(k));
      const auto col = static_cast<Eigen::Index>(c);
      for (int i = 0; i < 2; ++i) {
        const auto src = critics_[i].params()[e].col(col);
        auto dst = targets_[i].params()[e].col(col);
        dst = src + w * (dst - src);
      }
      synced_[e][c] = polyak_steps_;
    }
  }
}

void SacAgent::catch_up_all_targets() {
  for (std::size_t e = 0; e < config_.embeddings.size(); ++e) {
    Eigen::MatrixXd all(config_.state_dim, config_.embeddings[e].vocab);
    all.setZero();
    for (Eigen::Index c = 0; c < all.cols(); ++c) all(config_.embeddings[e].position, c) = static_cast<double>(c);
    catch_up_targets(all);
  }
}

const Mlp<double>& SacAgent::target_critic(int i) {
  catch_up_all_targets();
  return targets_[i];
}

double SacAgent::q_value(const StateVector& state, const Eigen::VectorXd& action) const {
  const Eigen::MatrixXd x = critic_input(Eigen::MatrixXd(state), Eigen::MatrixXd(to_unit(action)));
  return std::min(critics_[0].forward(x)(0, 0), critics_[1].forward(x)(0, 0));
}

bool SacAgent::observe(Transition t) {
  replay_.push(std::move(t));
  if (replay_.size() < config_.warmup || replay_.size() < config_.batch_size) return false;
  train_step(replay_.sample(config_.batch_size));
  return true;
}

SacAgent::Losses SacAgent::train_step(const std::vector<const Transition*>& batch) {
  const int k = action_dim();
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw std::invalid_argument("sac: empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd s(config_.state_dim, n), s2(config_.state_dim, n), a(k, n);
  Eigen::RowVectorXd r(n), cont(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const Transition& t = *batch[b];
    if (t.state.size() != config_.state_dim || t.next_state.size() != config_.state_dim || t.action.size() != k) {
      throw std::invalid_argument("sac: transition shape mismatch");
    }
    s.col(b) = t.state;
    s2.col(b) = t.next_state;
    a.col(b) = to_unit(t.action);
    r(b) = t.reward;
    cont(b) = t.continuing ? 1.0 : 0.0;
  }

  Losses losses;

  // Critics. Target columns read now or about to change must be current.
  catch_up_targets(s2);
  catch_up_targets(s);
  {
    const PolicySample next = sample_policy(actor_.forward(s2), rng_);
    const Eigen::MatrixXd x2 = critic_input(s2, next.unit);
    const Eigen::RowVectorXd qt = targets_[0].forward(x2).cwiseMin(targets_[1].forward(x2));
    const Eigen::RowVectorXd y = r + config_.gamma * cont.cwiseProduct(qt - config_.alpha * next.log_prob);
    const Eigen::MatrixXd x = critic_input(s, a);
    for (int i = 0; i < 2; ++i) {
      MlpTape<double> tape;
      const Eigen::RowVectorXd diff = critics_[i].forward(x, tape).row(0) - y;
      losses.critic += 0.5 * diff.squaredNorm() * inv_n;
      const Eigen::MatrixXd dq = 2.0 * inv_n * diff;
      adam_step(critic_opt_[i], critics_[i], critics_[i].backward(tape, x, dq));
    }
  }

  // Actor, reparameterised through the squashed sample.
  {
    MlpTape<double> actor_tape;
    const PolicySample p = sample_policy(actor_.forward(s, actor_tape), rng_);
    const Eigen::MatrixXd x = critic_input(s, p.unit);
    MlpTape<double> t1, t2;
    const Eigen::RowVectorXd q1 = critics_[0].forward(x, t1).row(0);
    const Eigen::RowVectorXd q2 = critics_[1].forward(x, t2).row(0);
    Eigen::MatrixXd pick1(1, n), pick2(1, n);
    for (Eigen::Index b = 0; b < n; ++b) {
      pick1(0, b) = q1(b) <= q2(b) ? 1.0 : 0.0;
      pick2(0, b) = 1.0 - pick1(0, b);
    }
    const Eigen::RowVectorXd qmin = q1.cwiseMin(q2);
    losses.actor = (config_.alpha * p.log_prob - qmin).mean();

    const Eigen::MatrixXd dq_da = critics_[0].backward(t1, x, pick1).input.bottomRows(k) +
                                  critics_[1].backward(t2, x, pick2).input.bottomRows(k);
    Eigen::MatrixXd dout(2 * k, n);
    for (Eigen::Index b = 0; b < n; ++b) {
      for (int j = 0; j < k; ++j) {
        const double au = p.unit(j, b);
        const double jac = 1.0 - au * au;
        const double c = 2.0 * au * jac / (jac + kSquashEps);  // d/du of -log(1 - tanh(u)^2 + eps)
        const double sd_eps = std::exp(p.log_std(j, b)) * p.noise(j, b);
        const double g = dq_da(j, b) * jac;
        dout(j, b) = inv_n * (config_.alpha * c - g);
        dout(k + j, b) = inv_n * (1.0 - p.clamped(j, b)) * (config_.alpha * (c * sd_eps - 1.0) - g * sd_eps);
      }
    }
    adam_step(actor_opt_, actor_, actor_.backward(actor_tape, s, dout));
  }

  const std::size_t n_emb = config_.embeddings.size();
  for (int i = 0; i < 2; ++i) {
    auto& t = targets_[i].params();
    const auto& src = critics_[i].params();
    for (std::size_t p = n_emb; p < t.size(); ++p) t[p] = config_.tau * src[p] + (1.0 - config_.tau) * t[p];
  }
  ++polyak_steps_;
  ++train_steps_;
  return losses;
}

}  // namespace rlcache
