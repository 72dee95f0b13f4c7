#pragma once

#include <random>

#include "pporpe/tensor_net.hpp"

namespace pporpe {

inline constexpr double kLogScaleMin = -5.0;
inline constexpr double kLogScaleMax = 2.0;

/// Diagonal Gaussian over actions. `log_scale` is already clamped.
struct GaussianHead {
  Vector mean;
  Vector log_scale;

  Eigen::Index dim() const { return mean.size(); }
  Vector scale() const { return log_scale.array().exp().matrix(); }
};

/// Splits a raw network output [mean | log_scale] into a head, clamping the
/// log-scale half to [kLogScaleMin, kLogScaleMax].
GaussianHead head_from_output(const Vector& raw);
GaussianHead head(const Mlp& net, const Vector& state);

double log_prob(const GaussianHead& head, const Vector& action);
double entropy(const GaussianHead& head);
Vector sample(const GaussianHead& head, std::mt19937_64& rng);

/// Derivatives of log_prob with respect to the raw network output, i.e. the
/// head cotangent. Clamped log-scale entries get zero derivative.
Vector log_prob_output_gradient(const Vector& raw_output, const Vector& action);
/// Derivative of entropy with respect to the raw network output.
Vector entropy_output_gradient(const Vector& raw_output);

/// grads += coefficient * d log pi(action | state) / d theta.
void score_backward(const Mlp& net, const Vector& state, const Vector& action, double coefficient,
                    GradBuffer& grads);

/// The learned policy and the slowly tracking baseline policy that collects data.
struct PolicyPair {
  Mlp actor;
  Mlp baseline;
  double polyak_rate = 0.01;

  PolicyPair() = default;
  PolicyPair(Mlp actor_net, double rate);
};

/// baseline <- (1 - tau) * baseline + tau * actor.
void update_baseline(PolicyPair& pair);

}  // namespace pporpe
