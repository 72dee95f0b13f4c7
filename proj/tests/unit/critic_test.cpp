#include <gtest/gtest.h>

#include <vector>

#include "pporpe/critic.hpp"
#include "pporpe/errors.hpp"
#include "test_support.hpp"

namespace pporpe {
namespace {

using testing::random_vector;

// 1-input linear value net V(s) = w s + b
Mlp linear_value(double w, double b) {
  Mlp net({1, 1});
  net.parameters() << w, b;
  return net;
}

Transition scalar_transition(double s, double r, double s_next, bool terminal) {
  Transition t;
  t.state = Vector::Constant(1, s);
  t.action = Vector::Zero(1);
  t.reward = r;
  t.next_state = Vector::Constant(1, s_next);
  t.terminal = terminal;
  return t;
}

TEST(Advantage, Examples) {
  CriticPair pair(linear_value(0.0, 10.0), 0.01, 0.99);
  EXPECT_NEAR(advantage(pair, scalar_transition(0.0, 1.0, 0.0, false)), 0.9, 1e-12);

  CriticPair zero(linear_value(0.0, 0.0), 0.01, 0.99);
  EXPECT_EQ(advantage(zero, scalar_transition(0.0, 0.0, 5.0, true)), 0.0);

  CriticPair myopic(linear_value(2.0, 0.5), 0.01, 0.0);
  EXPECT_NEAR(advantage(myopic, scalar_transition(1.5, 0.7, 9.0, false)), 0.7 - 3.5, 1e-15);
}

TEST(Advantage, UsesTargetNetForNextState) {
  CriticPair pair(linear_value(1.0, 0.0), 0.5, 0.5);
  pair.target_net.parameters() << 3.0, 0.0;
  // r + 0.5 * 3 * 2 - 1 * 1
  EXPECT_NEAR(advantage(pair, scalar_transition(1.0, 0.25, 2.0, false)), 0.25 + 3.0 - 1.0, 1e-15);
}

TEST(Advantage, LinearInReward) {
  std::mt19937_64 rng(1);
  Mlp v({3, 4, 1});
  v.initialize(rng);
  CriticPair pair(v, 0.01, 0.99);
  Transition t;
  t.state = random_vector(3, rng);
  t.next_state = random_vector(3, rng);
  t.action = Vector::Zero(1);
  t.reward = 0.0;
  const double base = advantage(pair, t);
  for (double r : {-2.0, 0.5, 3.0}) {
    t.reward = r;
    EXPECT_NEAR(advantage(pair, t) - base, r, 1e-12);
  }
}

TEST(Advantage, BatchMatchesSingle) {
  std::mt19937_64 rng(2);
  Mlp v({2, 5, 1});
  v.initialize(rng);
  CriticPair pair(v, 0.01, 0.9);
  std::vector<Transition> batch;
  for (int i = 0; i < 6; ++i) {
    Transition t;
    t.state = random_vector(2, rng);
    t.next_state = random_vector(2, rng);
    t.action = Vector::Zero(1);
    t.reward = static_cast<double>(i);
    t.terminal = i % 3 == 0;
    batch.push_back(t);
  }
  const Vector a = advantages(pair, batch);
  for (std::size_t i = 0; i < batch.size(); ++i)
    EXPECT_NEAR(a[static_cast<Eigen::Index>(i)], advantage(pair, batch[i]), 1e-13);
}

TEST(CriticStep, ZeroTdErrorLeavesParameters) {
  CriticPair pair(linear_value(0.0, 2.0), 0.01, 0.5);
  AdamState opt(pair.value_net, {});
  // 1 + 0.5 * 2 - 2 = 0
  const std::vector<Transition> batch{scalar_transition(0.3, 1.0, 0.7, false)};
  const Vector before = pair.value_net.parameters();
  EXPECT_EQ(critic_step(pair, batch, opt), 0.0);
  EXPECT_EQ(pair.value_net.parameters(), before);
}

TEST(CriticStep, RegressesToConstantReward) {
  std::mt19937_64 rng(3);
  Mlp v({1, 8, 1});
  v.initialize(rng);
  CriticPair pair(v, 0.01, 0.99);
  AdamState opt(pair.value_net, {1e-2, 0.9, 0.999, 1e-8});
  const std::vector<Transition> batch{scalar_transition(0.5, 2.0, 0.0, true)};
  double loss = 1.0;
  for (int i = 0; i < 2000; ++i) loss = critic_step(pair, batch, opt);
  EXPECT_LT(loss, 1e-3);
  EXPECT_NEAR(pair.value_net.forward(batch[0].state)[0], 2.0, 0.05);
}

TEST(CriticStep, ReturnsHalfMeanSquaredTd) {
  std::mt19937_64 rng(4);
  Mlp v({2, 6, 1});
  v.initialize(rng);
  CriticPair pair(v, 0.01, 0.95);
  pair.target_net.parameters() += Vector::Constant(static_cast<Eigen::Index>(pair.target_net.parameter_count()), 0.05);
  std::vector<Transition> batch;
  for (int i = 0; i < 8; ++i) {
    Transition t;
    t.state = random_vector(2, rng);
    t.next_state = random_vector(2, rng);
    t.action = Vector::Zero(1);
    t.reward = 0.1 * i - 0.3;
    t.terminal = i == 5;
    batch.push_back(t);
  }
  double expected = 0.0;
  for (const auto& t : batch) {
    const double next = t.terminal ? 0.0 : pair.target_net.forward(t.next_state)[0];
    const double td = t.reward + 0.95 * next - pair.value_net.forward(t.state)[0];
    expected += 0.5 * td * td;
  }
  expected /= static_cast<double>(batch.size());
  AdamState opt(pair.value_net, {});
  EXPECT_NEAR(critic_step(pair, batch, opt), expected, 1e-12);
}

TEST(CriticStep, EmptyBatchRejected) {
  CriticPair pair(linear_value(0.0, 0.0), 0.01, 0.99);
  AdamState opt(pair.value_net, {});
  EXPECT_THROW(critic_step(pair, std::vector<Transition>{}, opt), ContractError);
}

TEST(CriticStep, LossNonIncreasingOnFixedBatch) {
  int good_seeds = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    Mlp v({3, 8, 1});
    v.initialize(rng);
    CriticPair pair(v, 0.01, 0.9);
    std::vector<Transition> batch;
    for (int i = 0; i < 16; ++i) {
      Transition t;
      t.state = random_vector(3, rng);
      t.next_state = random_vector(3, rng);
      t.action = Vector::Zero(1);
      t.reward = random_vector(1, rng)[0];
      batch.push_back(t);
    }
    AdamState opt(pair.value_net, {1e-3, 0.9, 0.999, 1e-8});
    double prev = critic_step(pair, batch, opt);
    bool monotone = true;
    for (int step = 0; step < 10; ++step) {
      const double loss = critic_step(pair, batch, opt);
      monotone = monotone && loss <= prev;
      prev = loss;
    }
    good_seeds += monotone;
  }
  EXPECT_GE(good_seeds, 9);
}

TEST(UpdateTarget, CopyHalfwayAndConvergence) {
  CriticPair hard(linear_value(0.0, 0.0), 1.0, 0.99);
  hard.value_net.parameters() << 2.0, 4.0;
  update_target(hard);
  EXPECT_EQ(hard.target_net.parameters(), hard.value_net.parameters());

  CriticPair half(linear_value(0.0, 0.0), 0.5, 0.99);
  half.value_net.parameters() << 2.0, 4.0;
  update_target(half);
  EXPECT_EQ(half.target_net.parameters(), Vector((Vector(2) << 1.0, 2.0).finished()));

  CriticPair slow(linear_value(0.0, 0.0), 0.2, 0.99);
  slow.value_net.parameters() << 1.0, 0.0;
  double gap = 1.0;
  for (int i = 0; i < 40; ++i) {
    update_target(slow);
    gap *= 0.8;
    EXPECT_NEAR(1.0 - slow.target_net.parameters()[0], gap, 1e-12);
  }
}

}  // namespace
}  // namespace pporpe
