#include "pporpe/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "pporpe/errors.hpp"

namespace pporpe {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ppo_clip: return "ppo_clip";
    case Method::ppo_rb: return "ppo_rb";
    case Method::rpe_fixed: return "rpe_fixed";
    case Method::rpe_adaptive: return "rpe_adaptive";
    case Method::unregularized: return "unregularized";
  }
  return "unknown";
}

std::string_view public_method_names() { return "ppo_clip, ppo_rb, rpe_fixed, rpe_adaptive"; }

Method parse_method(std::string_view name) {
  for (Method m : {Method::ppo_clip, Method::ppo_rb, Method::rpe_fixed, Method::rpe_adaptive,
                   Method::unregularized}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "'; valid methods: " + std::string(public_method_names()));
}

namespace {

bool is_rpe(Method m) { return m == Method::rpe_fixed || m == Method::rpe_adaptive; }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void SurrogateConfig::validate(double epsilon_min, double epsilon_max) const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (!(eta >= 0.0)) throw ConfigError("eta must be nonnegative");
  if (!(log_ratio_clamp > 0.0)) throw ConfigError("log-ratio clamp must be positive");
  if (!(epsilon_min > 0.0 && epsilon_max < 1.0 && epsilon_min <= epsilon_max))
    throw ConfigError("epsilon must lie in (0, 1)");
  if (!is_rpe(method)) return;

  // Both conditions are affine in epsilon, so the interval endpoints suffice.
  for (double eps : {epsilon_min, epsilon_max}) {
    for (double sigma : {1.0, -1.0}) {
      if (!(gain_denominator(eps, sigma, beta) > 0.0))
        throw ConfigError("beta=" + fmt(beta) + " with epsilon=" + fmt(eps) +
                          " makes the gain denominator nonpositive (sigma=" + fmt(sigma) + ")");
      if (!(1.0 - beta * (1.0 + sigma * eps) > 0.0))
        throw ConfigError("beta=" + fmt(beta) + " with epsilon=" + fmt(eps) +
                          " puts the threshold outside the relative-ratio range");
    }
  }
  if (beta < 0.1 || beta > 0.9) throw ConfigError("beta must lie in [0.1, 0.9] for RPE methods");
}

RatioPoint RatioPoint::make(double rho, double advantage, double beta) {
  return {rho, relative_ratio(rho, beta), advantage, advantage_sign(advantage)};
}

double density_ratio(double log_pi, double log_b, double clamp) {
  return std::exp(std::clamp(log_pi - log_b, -clamp, clamp));
}

double relative_ratio(double rho, double beta) {
  if (beta == 1.0 && rho == 0.0) throw ContractError("relative ratio undefined for beta=1, rho=0");
  return rho / (1.0 - beta + beta * rho);
}

ThresholdRatios threshold_ratios(double epsilon, double sigma, double beta) {
  const double denom = 1.0 - beta * (1.0 + sigma * epsilon);
  if (!(denom > 0.0)) throw ConfigError("threshold ratio undefined: 1 - beta (1 + sigma eps) <= 0");
  return {1.0 + sigma * epsilon, 1.0 + sigma * epsilon / denom};
}

double gain_denominator(double epsilon, double sigma, double beta) {
  return beta * sigma * epsilon * epsilon + 2.0 * epsilon * (1.0 - beta * (1.0 + sigma * epsilon));
}

double gain(double advantage, double epsilon, double beta) {
  const double denom = gain_denominator(epsilon, advantage_sign(advantage), beta);
  if (!(denom > 0.0)) throw ConfigError("gain denominator is nonpositive");
  return std::abs(advantage) / denom;
}

double rpe_negative_loss(double rho, double advantage, double epsilon, double beta) {
  const double c = gain(advantage, epsilon, beta);
  const double mix = 1.0 - beta + beta * rho;
  const double dev = rho / mix - 1.0;
  return rho * advantage - c * mix * dev * dev;
}

double a_tilde_rpe(double rho, double advantage, double epsilon, double beta) {
  const double c = gain(advantage, epsilon, beta);
  const double mix = 1.0 - beta + beta * rho;
  const double dev = rho / mix - 1.0;
  // rho_beta / rho == 1 / mix
  return advantage - c * dev * (beta * dev + 2.0 * (1.0 - beta) / mix);
}

namespace {

bool outside_trust_region(double rho, double sigma, double epsilon) {
  return sigma * (rho - 1.0) >= epsilon;
}

}  // namespace

double rho_ppo(double rho, double advantage, double epsilon, double eta) {
  const double sigma = advantage_sign(advantage);
  if (outside_trust_region(rho, sigma, epsilon))
    return -eta * rho + (1.0 + eta) * (1.0 + sigma * epsilon);
  return rho;
}

double a_tilde_ppo(double rho, double advantage, double epsilon, double eta) {
  const double sigma = advantage_sign(advantage);
  if (outside_trust_region(rho, sigma, epsilon)) return eta == 0.0 ? 0.0 : -eta * advantage;
  return advantage;
}

double omega_ppo(double rho, double advantage, double epsilon, double eta) {
  const double sigma = advantage_sign(advantage);
  if (outside_trust_region(rho, sigma, epsilon))
    return advantage * (1.0 + eta) * (1.0 - (1.0 + sigma * epsilon) / rho);
  return 0.0;
}

double surrogate_coefficient(const RatioPoint& p, const SurrogateConfig& config,
                             double epsilon_now) {
  switch (config.method) {
    case Method::ppo_clip: return p.rho * a_tilde_ppo(p.rho, p.advantage, epsilon_now, 0.0);
    case Method::ppo_rb: return p.rho * a_tilde_ppo(p.rho, p.advantage, epsilon_now, config.eta);
    case Method::rpe_fixed:
    case Method::rpe_adaptive:
      return p.rho * a_tilde_rpe(p.rho, p.advantage, epsilon_now, config.beta);
    case Method::unregularized: return p.rho * p.advantage;
  }
  throw ConfigError("surrogate_coefficient: unknown method");
}

double surrogate_negative_loss(const RatioPoint& p, const SurrogateConfig& config,
                               double epsilon_now) {
  switch (config.method) {
    case Method::ppo_clip: return rho_ppo(p.rho, p.advantage, epsilon_now, 0.0) * p.advantage;
    case Method::ppo_rb: return rho_ppo(p.rho, p.advantage, epsilon_now, config.eta) * p.advantage;
    case Method::rpe_fixed:
    case Method::rpe_adaptive:
      return rpe_negative_loss(p.rho, p.advantage, epsilon_now, config.beta);
    case Method::unregularized: return p.rho * p.advantage;
  }
  throw ConfigError("surrogate_negative_loss: unknown method");
}

double pearson_divergence_estimate(std::span<const double> log_ratios) {
  if (log_ratios.empty()) throw ContractError("pearson_divergence_estimate: empty sample");
  double sum = 0.0;
  for (double lr : log_ratios) {
    const double d = std::exp(lr) - 1.0;
    sum += 0.5 * d * d;
  }
  return sum / static_cast<double>(log_ratios.size());
}

}  // namespace pporpe
