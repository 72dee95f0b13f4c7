#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "pporpe/errors.hpp"
#include "pporpe/threshold.hpp"

namespace pporpe {
namespace {

void observe_one(ThresholdState& s, double d) {
  const std::vector<double> v{d};
  s.observe(v);
}

TEST(Threshold, FreshStateEpsilon) {
  ThresholdState s{ThresholdParams{}};
  EXPECT_NEAR(s.current_epsilon(), 0.45, 1e-15);
}

TEST(Threshold, FirstObservation) {
  ThresholdState s{ThresholdParams{}};
  observe_one(s, 0.3);
  EXPECT_DOUBLE_EQ(s.delta_max(), 0.3);
  EXPECT_NEAR(s.delta(), 0.9993, 1e-15);
}

TEST(Threshold, EmptyObservationIsNoOp) {
  ThresholdState s{ThresholdParams{}};
  observe_one(s, 0.3);
  const double d = s.delta(), m = s.delta_max();
  s.observe({});
  EXPECT_EQ(s.delta(), d);
  EXPECT_EQ(s.delta_max(), m);
}

TEST(Threshold, NegativeDeviationRejected) {
  ThresholdState s{ThresholdParams{}};
  EXPECT_THROW(observe_one(s, -0.1), ContractError);
}

TEST(Threshold, ClampedEpsilonValues) {
  // drive Delta down to about 0.05 and about 0.3 and read epsilon
  ThresholdParams p;
  p.lambda = 0.5;
  ThresholdState low(p);
  for (int i = 0; i < 200; ++i) observe_one(low, 0.05);
  EXPECT_NEAR(low.delta(), 0.05, 1e-12);
  EXPECT_NEAR(low.current_epsilon(), 0.05, 1e-15);
  ThresholdState mid(p);
  for (int i = 0; i < 200; ++i) observe_one(mid, 0.3);
  EXPECT_NEAR(mid.current_epsilon(), 0.15, 1e-12);
}

TEST(Threshold, FixedPointOfConstantStream) {
  ThresholdState s{ThresholdParams{}};
  for (int i = 0; i < 10000; ++i) observe_one(s, 0.3);
  // scalar replay of the recurrence
  double dmax = 0.0, delta = 1.0;
  for (int i = 0; i < 10000; ++i) {
    dmax = std::max(0.999 * dmax, 0.3);
    delta = 0.999 * delta + 0.001 * dmax;
  }
  EXPECT_NEAR(s.delta(), delta, 1e-12);
  EXPECT_NEAR(s.delta(), 0.3, 0.01);
  EXPECT_NEAR(s.current_epsilon(), 0.15, 0.005);
}

TEST(Threshold, EpsilonAlwaysInBounds) {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> dev(2.0);
  ThresholdParams p;
  p.lambda = 0.9;
  ThresholdState s(p);
  for (int i = 0; i < 20000; ++i) {
    std::vector<double> batch(1 + rng() % 5);
    for (auto& d : batch) d = dev(rng) * (i % 2000 < 1000 ? 5.0 : 0.001);
    s.observe(batch);
    const double eps = s.current_epsilon();
    ASSERT_GE(eps, 0.05 - 1e-15);
    ASSERT_LE(eps, 0.45 + 1e-15);
  }
}

TEST(Threshold, MonotoneResponse) {
  ThresholdState s{ThresholdParams{}};
  observe_one(s, 0.6);
  double prev = s.delta();
  for (int i = 0; i < 100; ++i) {
    observe_one(s, 0.0);  // Delta_max decays slowly, Delta keeps falling toward it
    EXPECT_LT(s.delta(), prev);
    EXPECT_GT(s.delta(), s.delta_max());
    prev = s.delta();
  }
  const double m = s.delta_max();
  const std::vector<double> batch{0.1, m + 0.2, 0.0};
  s.observe(batch);
  EXPECT_DOUBLE_EQ(s.delta_max(), m + 0.2);
}

TEST(Threshold, BatchVersusPerSample) {
  const std::vector<double> batch{0.2, 0.7, 0.4};
  ThresholdState b{ThresholdParams{}};
  b.observe(batch);
  EXPECT_DOUBLE_EQ(b.delta_max(), 0.7);
  EXPECT_NEAR(b.delta(), 0.999 + 0.001 * 0.7, 1e-15);

  ThresholdParams p;
  p.per_sample = true;
  ThresholdState ps(p);
  ps.observe(batch);
  double dmax = 0.0, delta = 1.0;
  for (double d : batch) {
    dmax = std::max(0.999 * dmax, d);
    delta = 0.999 * delta + 0.001 * dmax;
  }
  EXPECT_DOUBLE_EQ(ps.delta(), delta);
}

TEST(ThresholdParams, Validation) {
  ThresholdParams p;
  EXPECT_NO_THROW(p.validate());
  p.delta_lower = 0.6;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.lambda = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace pporpe
