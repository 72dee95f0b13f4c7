#pragma once

#include <span>
#include <string_view>

namespace pporpe {

/// Which regularized surrogate drives the policy gradient.
///
/// `unregularized` is the plain importance-weighted objective rho * A (the
/// C = 0 ablation). It is available to library callers for comparisons but is
/// not one of the methods offered on the command line.
enum class Method { ppo_clip, ppo_rb, rpe_fixed, rpe_adaptive, unregularized };

std::string_view to_string(Method m);
/// Accepts ppo_clip, ppo_rb, rpe_fixed, rpe_adaptive and unregularized.
Method parse_method(std::string_view name);
/// The method names exposed to users, comma separated.
std::string_view public_method_names();

inline constexpr double kDefaultLogRatioClamp = 20.0;

struct SurrogateConfig {
  Method method = Method::rpe_adaptive;
  double beta = 0.5;
  double epsilon = 0.2;   // fixed-threshold methods
  double eta = 0.0;       // rollback strength, ppo_rb only
  double log_ratio_clamp = kDefaultLogRatioClamp;

  /// Throws ConfigError. `epsilon_range` is the interval the threshold can
  /// take at run time; for fixed methods pass {epsilon, epsilon}.
  void validate(double epsilon_min, double epsilon_max) const;
};

/// Sign convention shared by every formula here: sign(0) = +1.
inline double advantage_sign(double advantage) { return advantage >= 0.0 ? 1.0 : -1.0; }

/// One sample's density-ratio context.
struct RatioPoint {
  double rho = 1.0;
  double rho_beta = 1.0;
  double advantage = 0.0;
  double sigma = 1.0;

  static RatioPoint make(double rho, double advantage, double beta);
};

double density_ratio(double log_pi, double log_b, double clamp = kDefaultLogRatioClamp);

/// rho / (1 - beta + beta * rho). Throws ContractError for beta = 1, rho = 0.
double relative_ratio(double rho, double beta);

struct ThresholdRatios {
  double rho_beta;  // 1 + sigma * eps
  double rho;       // the raw ratio mapping onto it
};

/// Throws ConfigError when 1 - beta (1 + sigma eps) <= 0.
ThresholdRatios threshold_ratios(double epsilon, double sigma, double beta);

/// beta sigma eps^2 + 2 eps (1 - beta (1 + sigma eps)).
double gain_denominator(double epsilon, double sigma, double beta);

/// Regularization gain C that zeroes the RPE gradient at the threshold.
double gain(double advantage, double epsilon, double beta);

/// The RPE surrogate advantage A^RPE = A - C (1 - beta + beta rho)(rho_beta - 1)^2 / rho
/// times rho, i.e. the per-sample negative loss. Well defined at rho = 0.
double rpe_negative_loss(double rho, double advantage, double epsilon, double beta);

/// d(rho A^RPE)/d rho, the RPE gradient advantage.
double a_tilde_rpe(double rho, double advantage, double epsilon, double beta);

/// Clipped (eta = 0) or rolled-back ratio.
double rho_ppo(double rho, double advantage, double epsilon, double eta);

/// d(rho_ppo * A)/d rho.
double a_tilde_ppo(double rho, double advantage, double epsilon, double eta);

/// The regularizer implied by rho_ppo: rho (A - omega) = rho_ppo A.
double omega_ppo(double rho, double advantage, double epsilon, double eta);

/// Scalar w with d(per-sample negative loss)/d(log pi) = w. The loss gradient
/// for the sample is -w * grad log pi. `epsilon_now` is the threshold in effect
/// (adaptive or configured).
double surrogate_coefficient(const RatioPoint& point, const SurrogateConfig& config,
                             double epsilon_now);

/// Per-sample negative loss for the configured method (rho A-dagger).
double surrogate_negative_loss(const RatioPoint& point, const SurrogateConfig& config,
                               double epsilon_now);

/// Sample mean of (rho - 1)^2 / 2 with rho = exp(log_ratio).
double pearson_divergence_estimate(std::span<const double> log_ratios);

}  // namespace pporpe
