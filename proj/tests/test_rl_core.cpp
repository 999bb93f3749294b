#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "rlcache/adam.hpp"
#include "rlcache/checkpoint.hpp"
#include "rlcache/dqn.hpp"
#include "rlcache/errors.hpp"
#include "rlcache/key_encoder.hpp"
#include "rlcache/mlp.hpp"
#include "rlcache/replay.hpp"
#include "rlcache/sac.hpp"
#include "scenarios.hpp"

using namespace rlcache;

namespace {

Transition transition(double s, int a, double r, double s2) {
  Transition t;
  t.state = StateVector::Constant(1, s);
  t.action = Eigen::VectorXd::Constant(1, a);
  t.reward = r;
  t.next_state = StateVector::Constant(1, s2);
  return t;
}

bool same_params(const Mlp<double>& a, const Mlp<double>& b) {
  if (a.params().size() != b.params().size()) return false;
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    if (a.params()[i] != b.params()[i]) return false;
  }
  return true;
}

// Three standard normals per binomial sigma.
bool within_3_sigma(double count, double n, double p) { return std::abs(count - n * p) <= 3.0 * std::sqrt(n * p * (1 - p)); }

}  // namespace

// ---- Mlp -----------------------------------------------------------------

TEST_CASE("mlp forward: zero net, identity layer, recompute oracle") {
  Mlp<double> zero(3, {4}, 2);
  CHECK(zero.forward(Mat<double>::Ones(3, 2)).isZero());

  Mlp<double> id(3, {}, 3);
  id.weight(0) = Mat<double>::Identity(3, 3);
  Mat<double> x(3, 1);
  x << 1.5, -2.0, 0.25;
  CHECK(id.forward(x) == x);

  Rng rng(3);
  Mlp<double> net(8, {64, 64}, 2);
  net.initialize(rng);
  Mat<double> in(8, 1);
  for (int i = 0; i < 8; ++i) in(i, 0) = rng.uniform(-1, 1);
  // straight-line recompute
  std::vector<double> h(in.data(), in.data() + 8);
  for (int l = 0; l < 3; ++l) {
    const auto& W = net.weight(l);
    std::vector<double> z(static_cast<std::size_t>(W.rows()));
    for (int i = 0; i < W.rows(); ++i) {
      double s = net.bias(l)(i, 0);
      for (int j = 0; j < W.cols(); ++j) s += W(i, j) * h[j];
      z[i] = (l < 2) ? std::max(0.0, s) : s;
    }
    h = z;
  }
  const auto out = net.forward(in);
  CHECK(out(0, 0) == doctest::Approx(h[0]).epsilon(1e-6));
  CHECK(out(1, 0) == doctest::Approx(h[1]).epsilon(1e-6));

  CHECK_THROWS_AS(net.forward(Mat<double>::Ones(7, 1)), std::invalid_argument);
  Mlp<double> emb(2, {4}, 1, {{0, 3, 2}});
  CHECK_THROWS_AS(emb.forward(Mat<double>::Constant(2, 1, 3.0)), std::invalid_argument);
  CHECK_NOTHROW(emb.forward(Mat<double>::Constant(2, 1, 2.0)));
}

TEST_CASE("mlp backward examples") {
  Rng rng(4);
  Mlp<double> net(3, {5}, 2);
  net.initialize(rng);
  Mat<double> x = Mat<double>::Ones(3, 2);
  MlpTape<double> tape;
  net.forward(x, tape);
  auto g = net.backward(tape, x, Mat<double>::Zero(2, 2));
  for (const auto& p : g.params) CHECK(p.isZero());
  CHECK_THROWS_AS(net.backward(tape, x, Mat<double>::Zero(3, 2)), std::invalid_argument);

  Mlp<double> lin(1, {}, 1);
  lin.weight(0)(0, 0) = 0.7;
  Mat<double> two = Mat<double>::Constant(1, 1, 2.0);
  lin.forward(two, tape);
  auto gl = lin.backward(tape, two, Mat<double>::Ones(1, 1));
  CHECK(gl.params[0](0, 0) == 2.0);
  CHECK(gl.params[1](0, 0) == 1.0);
  CHECK(gl.input(0, 0) == doctest::Approx(0.7));
}

TEST_CASE("property: analytic gradients agree with finite differences on 20 random nets") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    CHECK(oracles::mlp_gradcheck(seed) <= 1e-4);
  }
}

TEST_CASE("polyak update mixes parameters") {
  Mlp<double> a(1, {}, 1), b(1, {}, 1);
  a.weight(0)(0, 0) = 1.0;
  b.weight(0)(0, 0) = 3.0;
  polyak_update(a, b, 0.25);
  CHECK(a.weight(0)(0, 0) == doctest::Approx(1.5));
  Mlp<double> c(2, {}, 1);
  CHECK_THROWS_AS(polyak_update(a, c, 0.5), std::invalid_argument);
}

// ---- Adam ----------------------------------------------------------------

TEST_CASE("adam: zero gradient, first step, two-step hand recurrence") {
  AdamState<double> s;
  std::vector<Mat<double>> p{Mat<double>::Constant(1, 1, 0.5)};
  adam_step(s, p, {Mat<double>::Zero(1, 1)});
  CHECK(p[0](0, 0) == 0.5);

  AdamState<double> s1;
  std::vector<Mat<double>> q{Mat<double>::Zero(1, 1)};
  adam_step(s1, q, {Mat<double>::Ones(1, 1)});
  // m_hat = 1, v_hat = 1: step = lr / (1 + eps)
  CHECK(q[0](0, 0) == doctest::Approx(-3e-4 / (1 + 1e-8)).epsilon(1e-12));
  CHECK(s1.t == 1);

  const double g = 0.3, lr = 3e-4, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double theta = 1.0, m = 0, v = 0;
  for (int t = 1; t <= 2; ++t) {
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    theta -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
  }
  AdamState<double> s2;
  std::vector<Mat<double>> r{Mat<double>::Ones(1, 1)};
  adam_step(s2, r, {Mat<double>::Constant(1, 1, g)});
  adam_step(s2, r, {Mat<double>::Constant(1, 1, g)});
  CHECK(std::abs(r[0](0, 0) - theta) <= 1e-10);

  CHECK_THROWS_AS(adam_step(s2, r, {Mat<double>::Ones(2, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(adam_step(s2, r, {}), std::invalid_argument);
}

TEST_CASE("adam on a network leaves untouched embedding columns alone") {
  Rng rng(9);
  Mlp<double> net(2, {}, 1, {{0, 6, 2}});  // no ReLU, so both touched columns get a gradient
  net.initialize(rng);
  const Mat<double> table = net.params()[0];
  Mat<double> x(2, 2);
  x << 1, 3, 0.5, -0.5;
  MlpTape<double> tape;
  net.forward(x, tape);
  AdamState<double> s;
  adam_step(s, net, net.backward(tape, x, Mat<double>::Ones(1, 2)));
  for (int c = 0; c < 6; ++c) {
    if (c == 1 || c == 3) CHECK(net.params()[0].col(c) != table.col(c));
    else CHECK(net.params()[0].col(c) == table.col(c));
  }
}

// ---- replay / epsilon ----------------------------------------------------

TEST_CASE("replay ring semantics and readiness") {
  ReplayBuffer buf(2, 1);
  CHECK_THROWS_AS(buf.sample(1), NotReadyError);
  buf.push(transition(1, 0, 0, 0));
  REQUIRE(buf.sample(1).size() == 1);
  CHECK(buf.sample(1)[0]->state(0) == 1);
  buf.push(transition(2, 0, 0, 0));
  buf.push(transition(3, 0, 0, 0));
  CHECK(buf.size() == 2);
  CHECK(buf.at(0).state(0) == 2);
  CHECK(buf.at(1).state(0) == 3);
  CHECK_THROWS_AS(buf.sample(3), NotReadyError);
}

TEST_CASE("replay sampling is uniform with replacement") {
  ReplayBuffer buf(4, 7);
  for (int i = 0; i < 4; ++i) buf.push(transition(i, 0, 0, 0));
  std::map<int, int> count;
  for (int i = 0; i < 10000; ++i) ++count[static_cast<int>(buf.sample(1)[0]->state(0))];
  for (int i = 0; i < 4; ++i) CHECK(within_3_sigma(count[i], 10000, 0.25));
  // same seed, same draws
  ReplayBuffer a(4, 11), b(4, 11);
  for (int i = 0; i < 4; ++i) {
    a.push(transition(i, 0, 0, 0));
    b.push(transition(i, 0, 0, 0));
  }
  for (int i = 0; i < 100; ++i) CHECK(a.sample(3)[2]->state(0) == b.sample(3)[2]->state(0));
}

TEST_CASE("epsilon schedule") {
  EpsilonSchedule e;
  CHECK(e.value(0) == 1.0);
  CHECK(e.value(25000) == doctest::Approx(0.55));
  CHECK(e.value(50000) == 0.1);
  CHECK(e.value(1000000) == 0.1);
  double prev = 2.0;
  for (std::uint64_t s = 0; s < 60000; s += 997) {
    CHECK(e.value(s) <= prev);
    prev = e.value(s);
  }
}

// ---- key encoder / checkpoint ----------------------------------------------

TEST_CASE("key encoder assigns, repeats and overflows to 0") {
  KeyEncoder k(4);
  CHECK(k.encode("a") == 1);
  CHECK(k.encode("b") == 2);
  CHECK(k.encode("a") == 1);
  k.encode("c");
  k.encode("d");
  CHECK(k.encode("e") == 0);
  CHECK(k.peek("e") == 0);
  CHECK(k.peek("d") == 4);
  CHECK(k.vocab() == 5);
}

TEST_CASE("checkpoint round-trips bit for bit") {
  Rng rng(21);
  Mlp<double> net(3, {7, 5}, 2, {{1, 9, 4}});
  net.initialize(rng);
  net.weight(0)(0, 0) = 0.1 + 0.2;  // not representable in short decimal
  const auto text = checkpoint_to_json(net);
  Mlp<double> back(3, {7, 5}, 2, {{1, 9, 4}});
  checkpoint_from_json(back, text);
  CHECK(same_params(net, back));

  const auto path = (std::filesystem::temp_directory_path() / "rlcache_ckpt_test.json").string();
  save_checkpoint(net, path);
  Mlp<double> file(3, {7, 5}, 2, {{1, 9, 4}});
  load_checkpoint(file, path);
  CHECK(same_params(net, file));
  std::filesystem::remove(path);

  Mlp<double> wrong(3, {7, 6}, 2, {{1, 9, 4}});
  CHECK_THROWS_AS(checkpoint_from_json(wrong, text), std::invalid_argument);
  CHECK_THROWS_AS(checkpoint_from_json(back, "{\"format\":\"other\"}"), std::invalid_argument);
}

// ---- DQN -----------------------------------------------------------------

namespace {

DqnConfig linear_dqn(double gamma) {
  DqnConfig c;
  c.state_dim = 1;
  c.actions = 2;
  c.hidden = {};
  c.gamma = gamma;
  c.batch_size = 1;
  c.warmup = 1;
  return c;
}

void set_q(DqnAgent& agent, double q0, double q1) {
  agent.online().weight(0).setZero();
  agent.online().bias(0)(0, 0) = q0;
  agent.online().bias(0)(1, 0) = q1;
  agent.sync_target();
}

}  // namespace

TEST_CASE("dqn act: argmax, ties, exploration") {
  DqnAgent agent(linear_dqn(0.0));
  Rng rng(1);
  set_q(agent, 0.2, 0.9);
  CHECK(agent.act_with_epsilon(StateVector::Ones(1), 0.0, rng) == 1);
  set_q(agent, 0.5, 0.5);
  CHECK(agent.act_with_epsilon(StateVector::Ones(1), 0.0, rng) == 0);
  CHECK(DqnAgent::argmax(Eigen::Vector3d(1, 3, 3)) == 1);
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += agent.act_with_epsilon(StateVector::Ones(1), 1.0, rng);
  CHECK(within_3_sigma(ones, 10000, 0.5));
}

TEST_CASE("dqn loss with gamma 0 reduces to (Q - r)^2") {
  DqnAgent agent(linear_dqn(0.0));
  const Transition t = transition(1.0, 1, 1.0, 1.0);
  set_q(agent, 0.0, 1.0);
  CHECK(agent.train_step({&t}) == doctest::Approx(0.0));
  set_q(agent, 0.0, 0.0);
  CHECK(agent.train_step({&t}) == doctest::Approx(1.0));
  const Transition bad = transition(1.0, 2, 1.0, 1.0);
  CHECK_THROWS_AS(agent.train_step({&bad}), std::invalid_argument);
}

TEST_CASE("property: dqn target network only moves at sync boundaries") {
  DqnConfig c = linear_dqn(0.9);
  c.hidden = {8};
  c.sync_interval = 7;
  c.batch_size = 4;
  c.warmup = 4;
  DqnAgent agent(c);
  Rng rng(2);
  Mlp<double> last = agent.target();
  for (int i = 0; i < 60; ++i) {
    agent.observe(transition(rng.uniform(), static_cast<int>(rng.below(2)), rng.uniform(), rng.uniform()));
    const bool boundary = agent.train_steps() > 0 && agent.train_steps() % 7 == 0;
    if (!same_params(last, agent.target())) {
      CHECK(boundary);
      CHECK(same_params(agent.target(), agent.online()));
      last = agent.target();
    }
  }
  CHECK(agent.train_steps() == 57);
}

TEST_CASE("dqn learns the toy MDP's value-iteration policy") {
  const oracles::TwoStateMdp far_sighted;
  CHECK(scenarios::train_dqn_mdp(1, 5000, far_sighted) == oracles::value_iteration(far_sighted));
  oracles::TwoStateMdp myopic;
  myopic.gamma = 0.3;
  const auto want = oracles::value_iteration(myopic);
  CHECK(want[0] == 0);
  CHECK(scenarios::train_dqn_mdp(1, 5000, myopic) == want);
}

TEST_CASE("property: identical seeds and transitions give identical dqn parameters") {
  DqnConfig c = scenarios::mdp_dqn_config(5, 0.9);
  DqnAgent a(c), b(c);
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const int s = static_cast<int>(rng.below(2)), act = static_cast<int>(rng.below(2));
    Transition t;
    t.state = scenarios::one_hot(s);
    t.action = Eigen::VectorXd::Constant(1, act);
    t.reward = rng.uniform();
    t.next_state = scenarios::one_hot(act);
    a.observe(t);
    b.observe(t);
  }
  CHECK(a.train_steps() > 0);
  CHECK(same_params(a.online(), b.online()));
}

// ---- SAC -----------------------------------------------------------------

namespace {

SacConfig small_sac(std::uint64_t seed) {
  SacConfig c;
  c.state_dim = 3;
  c.low = Eigen::Vector2d(0.0, -5.0);
  c.high = Eigen::Vector2d(1.0, 120.0);
  c.hidden = {16, 16};
  c.batch_size = 8;
  c.warmup = 8;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("property: sac actions stay inside the bounds") {
  SacAgent agent(small_sac(1));
  Rng rng(5);
  Eigen::MatrixXd states(3, 1000);
  for (int rep = 0; rep < 100; ++rep) {
    for (Eigen::Index i = 0; i < states.size(); ++i) states(i) = rng.uniform(-50, 50);
    const Eigen::MatrixXd a = agent.act_batch(states, rep % 2 == 0);
    CHECK((a.row(0).array() >= 0.0).all());
    CHECK((a.row(0).array() <= 1.0).all());
    CHECK((a.row(1).array() >= -5.0).all());
    CHECK((a.row(1).array() <= 120.0).all());
  }
}

TEST_CASE("sac deterministic mode is repeatable; extreme log-std stays finite") {
  SacAgent agent(small_sac(2));
  const StateVector s = StateVector::Constant(3, 0.3);
  CHECK(agent.act(s, true) == agent.act(s, true));

  auto& last = agent.actor().bias(agent.actor().layers() - 1);
  last(2, 0) = 1e3;
  last(3, 0) = -1e3;
  last(0, 0) = 1e3;
  const auto [mean, log_std] = agent.policy_head(s);
  (void)mean;
  CHECK(log_std(0) == SacAgent::kLogStdMax);
  CHECK(log_std(1) == SacAgent::kLogStdMin);
  for (int i = 0; i < 100; ++i) {
    const auto a = agent.act(s, false);
    CHECK(std::isfinite(a(0)));
    CHECK(std::isfinite(a(1)));
    CHECK(a(0) <= 1.0);
    CHECK(a(1) >= -5.0);
  }
}

TEST_CASE("sac on identical transitions: finite losses, parameters move") {
  SacAgent agent(small_sac(3));
  Transition t;
  t.state = StateVector::Constant(3, 0.1);
  t.action = Eigen::Vector2d(0.5, 60.0);
  t.reward = 1.0;
  t.next_state = t.state;
  std::vector<const Transition*> batch(8, &t);
  const Mlp<double> before = agent.actor();
  const Mlp<double> critic_before = agent.critic(0);
  const auto losses = agent.train_step(batch);
  CHECK(std::isfinite(losses.critic));
  CHECK(std::isfinite(losses.actor));
  CHECK_FALSE(same_params(before, agent.actor()));
  CHECK_FALSE(same_params(critic_before, agent.critic(0)));
}

TEST_CASE("sac critic loss falls on zero reward with gamma 0") {
  SacConfig c = small_sac(4);
  c.gamma = 0.0;
  c.lr = 1e-3;
  SacAgent agent(c);
  Rng rng(8);
  ReplayBuffer buf(256, 1);
  for (int i = 0; i < 256; ++i) {
    Transition t;
    t.state = StateVector::NullaryExpr(3, [&] { return rng.uniform(); });
    t.action = Eigen::Vector2d(rng.uniform(), rng.uniform(-5, 120));
    t.reward = 0.0;
    t.next_state = t.state;
    buf.push(t);
  }
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double loss = agent.train_step(buf.sample(32)).critic;
    if (i < 50) first += loss;
    if (i >= 450) last += loss;
  }
  CHECK(last < first);
}

TEST_CASE("lazy target averaging of embeddings matches eager Polyak averaging") {
  SacConfig c;
  c.state_dim = 2;
  c.embeddings = {{0, 50, 4}};
  c.hidden = {8};
  c.batch_size = 4;
  c.tau = 0.05;
  c.seed = 6;
  SacAgent agent(c);
  Mlp<double> eager[2] = {agent.target_critic(0), agent.target_critic(1)};
  Rng rng(4);
  std::vector<Transition> pool;
  for (int i = 0; i < 64; ++i) {
    Transition t;
    t.state = Eigen::Vector2d(static_cast<double>(rng.below(50)), rng.uniform());
    t.action = Eigen::VectorXd::Constant(1, rng.uniform());
    t.reward = rng.uniform();
    t.next_state = Eigen::Vector2d(static_cast<double>(rng.below(50)), rng.uniform());
    pool.push_back(t);
  }
  for (int step = 0; step < 200; ++step) {
    std::vector<const Transition*> batch;
    for (int b = 0; b < 4; ++b) batch.push_back(&pool[rng.below(pool.size())]);
    agent.train_step(batch);
    for (int i = 0; i < 2; ++i) polyak_update(eager[i], agent.critic(i), c.tau);
  }
  for (int i = 0; i < 2; ++i) {
    const auto& lazy = agent.target_critic(i);
    for (std::size_t p = 0; p < lazy.params().size(); ++p) CHECK((lazy.params()[p] - eager[i].params()[p]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("property: identical seeds and transitions give identical sac parameters") {
  SacConfig c = small_sac(9);
  SacAgent a(c), b(c);
  for (int i = 0; i < 100; ++i) {
    const StateVector s = StateVector::Constant(3, 0.01 * i);
    const auto act_a = a.act(s), act_b = b.act(s);
    REQUIRE(act_a == act_b);
    Transition t;
    t.state = s;
    t.action = act_a;
    t.reward = act_a(0);
    t.next_state = s;
    a.observe(t);
    b.observe(t);
  }
  CHECK(same_params(a.actor(), b.actor()));
  CHECK(same_params(a.critic(1), b.critic(1)));
}

TEST_CASE("sac finds the bandit optimum") {
  CHECK(std::abs(scenarios::train_sac_bandit(1, 3000) - 0.7) <= 0.1);
}
