#pragma once

// Small training loops with known answers, shared by unit tests and the
// acceptance binary.

#include <array>
#include <cstdint>

#include "oracles.hpp"
#include "rlcache/dqn.hpp"
#include "rlcache/sac.hpp"

namespace scenarios {

inline rlcache::StateVector one_hot(int s) {
  rlcache::StateVector v = rlcache::StateVector::Zero(2);
  v(s) = 1.0;
  return v;
}

inline rlcache::DqnConfig mdp_dqn_config(std::uint64_t seed, double gamma) {
  rlcache::DqnConfig c;
  c.state_dim = 2;
  c.actions = 2;
  c.hidden = {32, 32};
  c.gamma = gamma;
  c.lr = 1e-3;
  c.batch_size = 32;
  c.warmup = 64;
  c.sync_interval = 100;
  c.epsilon = {1.0, 0.2, 2000};
  c.seed = seed;
  return c;
}

// Epsilon-greedy interaction with the toy MDP, one train step per move.
// Returns the greedy policy per state after `train_steps` updates.
inline std::array<int, 2> train_dqn_mdp(std::uint64_t seed, std::uint64_t train_steps, const oracles::TwoStateMdp& mdp = {}) {
  rlcache::DqnAgent agent(mdp_dqn_config(seed, mdp.gamma));
  int s = 0;
  while (agent.train_steps() < train_steps) {
    const int a = agent.act(one_hot(s));
    const int s2 = mdp.next(s, a);
    rlcache::Transition t;
    t.state = one_hot(s);
    t.action = Eigen::VectorXd::Constant(1, a);
    t.reward = mdp.reward[s][a];
    t.next_state = one_hot(s2);
    agent.observe(std::move(t));
    s = s2;
  }
  return {agent.greedy(one_hot(0)), agent.greedy(one_hot(1))};
}

// 1-D bandit on [0, 1] with reward -(a - 0.7)^2. The entropy temperature is
// lowered to 0.01: at 0.2 the entropy bonus outweighs a reward whose whole
// range is 0.49 and pulls the mean to the middle of the interval.
inline double train_sac_bandit(std::uint64_t seed, int steps) {
  rlcache::SacConfig c;
  c.state_dim = 1;
  c.low = Eigen::VectorXd::Zero(1);
  c.high = Eigen::VectorXd::Ones(1);
  c.gamma = 0.0;
  c.alpha = 0.01;
  c.lr = 1e-3;
  c.seed = seed;
  rlcache::SacAgent agent(c);
  const rlcache::StateVector s = rlcache::StateVector::Ones(1);
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd a = agent.act(s, false);
    rlcache::Transition t;
    t.state = s;
    t.action = a;
    t.reward = -(a(0) - 0.7) * (a(0) - 0.7);
    t.next_state = s;
    agent.observe(std::move(t));
  }
  return agent.act(s, true)(0);
}

}  // namespace scenarios
