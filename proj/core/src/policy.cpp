#include "pporpe/policy.hpp"

#include <cmath>

#include "pporpe/errors.hpp"

namespace pporpe {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)

void check_raw(const Vector& raw) {
  if (raw.size() == 0 || raw.size() % 2 != 0)
    throw ContractError("policy output must hold [mean | log_scale] halves");
}

}  // namespace

GaussianHead head_from_output(const Vector& raw) {
  check_raw(raw);
  const Eigen::Index d = raw.size() / 2;
  GaussianHead h;
  h.mean = raw.head(d);
  h.log_scale = raw.tail(d).cwiseMax(kLogScaleMin).cwiseMin(kLogScaleMax);
  return h;
}

GaussianHead head(const Mlp& net, const Vector& state) {
  return head_from_output(net.forward(state));
}

double log_prob(const GaussianHead& head, const Vector& action) {
  if (action.size() != head.dim()) throw ContractError("log_prob: action dimension mismatch");
  const Eigen::ArrayXd z = (action - head.mean).array() / head.log_scale.array().exp();
  return -0.5 * z.square().sum() - head.log_scale.sum() -
         static_cast<double>(head.dim()) * kHalfLog2Pi;
}

double entropy(const GaussianHead& head) {
  return head.log_scale.sum() + static_cast<double>(head.dim()) * (0.5 + kHalfLog2Pi);
}

Vector sample(const GaussianHead& head, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector a(head.dim());
  for (Eigen::Index i = 0; i < head.dim(); ++i)
    a[i] = head.mean[i] + std::exp(head.log_scale[i]) * normal(rng);
  return a;
}

Vector log_prob_output_gradient(const Vector& raw_output, const Vector& action) {
  const GaussianHead h = head_from_output(raw_output);
  if (action.size() != h.dim()) throw ContractError("log_prob: action dimension mismatch");
  const Eigen::Index d = h.dim();
  Vector g(2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double inv_var = std::exp(-2.0 * h.log_scale[i]);
    const double diff = action[i] - h.mean[i];
    g[i] = diff * inv_var;
    const double raw_ls = raw_output[d + i];
    const bool clamped = raw_ls < kLogScaleMin || raw_ls > kLogScaleMax;
    g[d + i] = clamped ? 0.0 : diff * diff * inv_var - 1.0;
  }
  return g;
}

Vector entropy_output_gradient(const Vector& raw_output) {
  check_raw(raw_output);
  const Eigen::Index d = raw_output.size() / 2;
  Vector g = Vector::Zero(2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double raw_ls = raw_output[d + i];
    g[d + i] = (raw_ls < kLogScaleMin || raw_ls > kLogScaleMax) ? 0.0 : 1.0;
  }
  return g;
}

void score_backward(const Mlp& net, const Vector& state, const Vector& action, double coefficient,
                    GradBuffer& grads) {
  if (!std::isfinite(coefficient)) throw NumericError("score_backward: non-finite coefficient");
  if (coefficient == 0.0) return;
  const Vector raw = net.forward(state);
  net.backward(state, coefficient * log_prob_output_gradient(raw, action), grads);
}

PolicyPair::PolicyPair(Mlp actor_net, double rate)
    : actor(std::move(actor_net)), baseline(actor), polyak_rate(rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("baseline polyak rate must lie in (0, 1]");
}

void update_baseline(PolicyPair& pair) {
  polyak_update(pair.baseline, pair.actor, pair.polyak_rate);
}

}  // namespace pporpe
