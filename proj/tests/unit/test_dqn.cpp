#include <gtest/gtest.h>

#include <cmath>

#include "chain_mdp.hpp"
#include "safelight/agents/dqn.hpp"
#include "safelight/nn/losses.hpp"
#include "test_util.hpp"

using namespace safelight;
using namespace safelight::agents;
using safelight::testutil::ChainMdp;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

std::vector<Transition> random_batch(Rng& rng, std::size_t n, std::size_t dim, std::size_t actions, double p_unsafe) {
  std::vector<Transition> out(n);
  for (auto& t : out) {
    t.state = random_vector(rng, dim);
    t.next_state = random_vector(rng, dim);
    t.action = static_cast<int>(rng.below(actions));
    t.reward = rng.uniform(-1, 1);
    t.unsafe.assign(actions, false);
    for (std::size_t a = 0; a < actions; ++a) t.unsafe[a] = rng.bernoulli(p_unsafe);
    t.unsafe[(static_cast<std::size_t>(t.action) + 1) % actions] = false;  // never all unsafe
  }
  return out;
}

std::vector<const Transition*> pointers(const std::vector<Transition>& v) {
  std::vector<const Transition*> out;
  for (const auto& t : v) out.push_back(&t);
  return out;
}

AgentConfig chain_config() {
  AgentConfig c;
  c.gamma = ChainMdp::gamma;
  c.lr = 3e-4;
  c.batch_size = 32;
  c.warmup = 32;
  c.target_sync_steps = 50;
  c.buffer_capacity = 5000;
  c.hidden = {32, 32};
  return c;
}

// Uniform random behaviour policy, one gradient step per environment step.
void train_chain(DqnAgent& agent, int steps, Rng& env, bool negate_reward = false) {
  int s = 0;
  for (int k = 0; k < steps; ++k) {
    const int a = static_cast<int>(env.below(2));
    const int s2 = ChainMdp::next(s, a);
    Transition t;
    t.state = ChainMdp::encode(s);
    t.action = a;
    t.reward = negate_reward ? -ChainMdp::reward(s, a) : ChainMdp::reward(s, a);
    t.next_state = ChainMdp::encode(s2);
    agent.remember(std::move(t));
    agent.train_step({});
    s = env.bernoulli(0.1) ? static_cast<int>(env.below(2)) : s2;
  }
}

}  // namespace

TEST(DoubleQ, HandExample) {
  const std::vector<double> online{0.2, 0.5}, target{0.3, 0.1};
  EXPECT_EQ(double_q_value(1.0, false, 0.9, online, target), 1.0 + 0.9 * 0.1);
  EXPECT_DOUBLE_EQ(double_q_value(1.0, false, 0.9, online, target), 1.09);
  EXPECT_EQ(double_q_value(1.0, true, 0.9, online, target), 1.0);
}

TEST(DoubleQ, ArgmaxLowestIndexOnTies) {
  const std::vector<double> v{1.0, 3.0, 3.0, 2.0};
  EXPECT_EQ(argmax(v), 1);
}

TEST(Dueling, IdentityHoldsOnRandomNetworks) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    DuelingQNetwork net(6, 5, {12, 8}, seed % 2 ? 4 : 0, rng);
    const auto x = random_vector(rng, net.input_dim());
    const auto q = net.q_values(x);
    const auto a = net.advantages(x);
    const double v = net.value(x);
    double mean_a = 0.0;
    for (double ai : a) mean_a += ai / a.size();
    for (std::size_t i = 0; i < q.size(); ++i) ASSERT_NEAR(q[i], v + a[i] - mean_a, 1e-9);
  }
}

TEST(Dueling, BatchMatchesSingle) {
  Rng rng(3);
  DuelingQNetwork net(4, 3, {8}, 2, rng);
  nn::Matrix x(3, net.input_dim());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(-1, 1);
  const auto qb = net.q_batch(x);
  for (int i = 0; i < 3; ++i) {
    std::vector<double> row(x.row(i).data(), x.row(i).data() + x.cols());
    const auto q = net.q_values(row);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(qb(i, a), q[a], 1e-12);
  }
}

TEST(DqnLoss, GradientMatchesFiniteDifferences100Seeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t embed = seed % 3 == 0 ? 3 : 0;
    DuelingQNetwork net(5, 4, {7, 6}, embed, rng);
    auto batch = random_batch(rng, 6, 5, 4, 0.4);
    if (embed)
      for (auto& t : batch)
        for (bool u : t.unsafe) t.state.push_back(u ? 1.0 : 0.0);
    const auto ptrs = pointers(batch);
    std::vector<double> targets(6), weights(6);
    for (int i = 0; i < 6; ++i) {
      targets[i] = rng.uniform(-2, 2);
      weights[i] = rng.uniform(0.2, 1.0);
    }
    const LossWeights w{0.7, 0.0};
    const auto bl = dqn_batch_loss(net, ptrs, targets, weights, w);
    const auto g = bl.grads.views();
    auto params = net.parameters();
    ASSERT_EQ(params.size(), g.size());
    double diff2 = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k)
      for (std::size_t i = 0; i < params[k].size(); ++i) {
        const double old = params[k][i];
        params[k][i] = old + 1e-6;
        const double lp = dqn_batch_loss(net, ptrs, targets, weights, w).loss;
        params[k][i] = old - 1e-6;
        const double lm = dqn_batch_loss(net, ptrs, targets, weights, w).loss;
        params[k][i] = old;
        const double fd = (lp - lm) / 2e-6;
        diff2 += (fd - g[k][i]) * (fd - g[k][i]);
        na += fd * fd;
        nb += g[k][i] * g[k][i];
      }
    const double rel = std::sqrt(diff2) / std::max(std::sqrt(std::max(na, nb)), 1e-12);
    ASSERT_LE(rel, 1e-4) << "seed " << seed;
  }
}

TEST(DqnLoss, KlTermAddsSoftmaxMinusTargetOnUnsafeSamples) {
  Rng rng(17);
  DuelingQNetwork net(5, 4, {8}, 0, rng);
  const auto batch = random_batch(rng, 8, 5, 4, 0.5);
  const auto ptrs = pointers(batch);
  const std::vector<double> targets(8, 0.3), weights(8, 1.0);
  const auto plain = dqn_batch_loss(net, ptrs, targets, weights, {1.0, 0.0});
  const auto with = dqn_batch_loss(net, ptrs, targets, weights, {1.0, 2.0});

  // Oracle: the advantage-head upstream differs by lambda2 (softmax(A) - Â) / n
  // on samples whose executed action was unsafe.
  nn::Matrix da = nn::Matrix::Zero(8, 4);
  double kl = 0.0;
  std::size_t unsafe = 0;
  for (int i = 0; i < 8; ++i) {
    if (!batch[i].unsafe[batch[i].action]) continue;
    ++unsafe;
    safety::SafetyVerdict v;
    v.unsafe = batch[i].unsafe;
    const auto adv = net.advantages(batch[i].state);
    const auto target = safety::desired_distribution(v, adv, batch[i].action);
    const auto p = nn::softmax(adv);
    kl += nn::kl_divergence(target, p).value / 8.0;
    for (int j = 0; j < 4; ++j) da(i, j) = 2.0 * (p[j] - target[j]) / 8.0;
  }
  ASSERT_GT(unsafe, 0u);
  EXPECT_EQ(with.unsafe_samples, unsafe);
  EXPECT_NEAR(with.kl, kl, 1e-12);
  EXPECT_NEAR(with.loss, plain.mse + 2.0 * kl, 1e-12);
  nn::Matrix x(8, 5);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 5; ++j) x(i, j) = batch[i].state[j];
  const auto cache = net.forward(x);
  const auto extra = net.backward(cache, nn::Matrix::Zero(8, 4), da);
  const auto gp = plain.grads.views(), gw = with.grads.views(), ge = extra.views();
  for (std::size_t k = 0; k < gp.size(); ++k)
    for (std::size_t i = 0; i < gp[k].size(); ++i) ASSERT_NEAR(gw[k][i], gp[k][i] + ge[k][i], 1e-12);
}

TEST(DqnLoss, AllSafeBatchHasExactlyZeroKl) {
  Rng rng(5);
  DuelingQNetwork net(5, 4, {8}, 0, rng);
  auto batch = random_batch(rng, 16, 5, 4, 0.5);
  for (auto& t : batch) t.unsafe[static_cast<std::size_t>(t.action)] = false;
  const std::vector<double> targets(16, 0.0), weights(16, 1.0);
  const auto plain = dqn_batch_loss(net, pointers(batch), targets, weights, {1.0, 0.0});
  const auto with = dqn_batch_loss(net, pointers(batch), targets, weights, {1.0, 0.5});
  EXPECT_TRUE(with.all_safe);
  EXPECT_EQ(with.kl, 0.0);
  EXPECT_EQ(with.loss, plain.loss);
  const auto a = plain.grads.views(), b = with.grads.views();
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) ASSERT_EQ(a[k][i], b[k][i]);
}

TEST(DqnAgent, ChainMdpReachesBellmanFixedPoint) {
  DqnAgent agent(2, 2, {32, 32}, 0, chain_config(), 11);
  Rng env(4);
  train_chain(agent, 20000, env);
  for (int s = 0; s < 2; ++s) {
    const auto q = agent.q_values(ChainMdp::encode(s));
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(q[a], ChainMdp::q_star[s][a], 1e-2) << "s" << s << " a" << a;
  }
}

TEST(DqnAgent, SecondHeadOnOtherRewardAlsoConverges) {
  // The mobility and safety heads of the two-head variant are independent learners.
  DqnAgent agent(2, 2, {32, 32}, 0, chain_config(), mix_seed(11, 2));
  Rng env(8);
  train_chain(agent, 10000, env, true);
  // Negated reward: avoid (s1, a1). Q* = {s0: {0, 0}, s1: {0, -1}}.
  const double expect[2][2] = {{0.0, 0.0}, {0.0, -1.0}};
  for (int s = 0; s < 2; ++s) {
    const auto q = agent.q_values(ChainMdp::encode(s));
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(q[a], expect[s][a], 1e-2);
  }
}

TEST(DqnAgent, EpsilonExtremes) {
  AgentConfig c;
  c.hidden = {8};
  DqnAgent agent(3, 4, c.hidden, 0, c, 1);
  const std::vector<double> s{0.1, -0.2, 0.3};
  const int g = agent.greedy_action(s);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(agent.select_action(s, 0.0), g);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 8000; ++i) counts[agent.select_action(s, 1.0)]++;
  for (int c : counts) EXPECT_NEAR(c, 2000, 200);
}

TEST(DqnAgent, EpsilonScheduleIsLinear) {
  EpsilonSchedule e{1.0, 0.1, 100};
  EXPECT_DOUBLE_EQ(e.at(0), 1.0);
  EXPECT_DOUBLE_EQ(e.at(50), 0.55);
  EXPECT_DOUBLE_EQ(e.at(100), 0.1);
  EXPECT_DOUBLE_EQ(e.at(1000), 0.1);
}

TEST(DqnAgent, CheckpointRestoresTrainingExactly) {
  auto cfg = chain_config();
  DqnAgent a(2, 2, cfg.hidden, 0, cfg, 3);
  Rng env(1);
  train_chain(a, 300, env);
  nn::Checkpoint ck;
  a.store(ck, "agent");
  const auto reloaded = nn::Checkpoint::from_json(ck.to_json());
  DqnAgent b(2, 2, cfg.hidden, 0, cfg, 999);
  b.restore(reloaded, "agent");
  EXPECT_EQ(a.q_values(ChainMdp::encode(0)), b.q_values(ChainMdp::encode(0)));
  EXPECT_EQ(a.train_steps(), b.train_steps());
  EXPECT_EQ(a.select_action(ChainMdp::encode(1), 0.5), b.select_action(ChainMdp::encode(1), 0.5));
}
