#pragma once

#include <span>

namespace pporpe {

struct ThresholdParams {
  double lambda = 0.999;
  double kappa = 0.5;
  double delta_lower = 0.1;
  /// Observe one deviation at a time instead of one batch maximum per call.
  bool per_sample = false;

  double delta_upper() const { return 1.0 - delta_lower; }
  double epsilon_min() const { return kappa * delta_lower; }
  double epsilon_max() const { return kappa * delta_upper(); }
  void validate() const;
};

/// Running estimate of how far rho_beta strays from 1, turned into a threshold.
///
/// Delta_max holds a decaying recent maximum of |rho_beta - 1| and Delta
/// follows it with a slow exponential average. The threshold is
/// kappa * clamp(Delta, delta_lower, 1 - delta_lower). Starting from
/// Delta = 1 means the first updates run with the widest threshold.
class ThresholdState {
 public:
  ThresholdState() = default;
  explicit ThresholdState(ThresholdParams params);

  /// Threshold implied by the current Delta, before this step's observations.
  double current_epsilon() const;

  /// Folds a batch of |rho_beta - 1| values in. Batch mode applies one decay
  /// of Delta_max with the batch maximum followed by one Delta update; per-sample
  /// mode repeats that pair for each value in order. Empty input is a no-op.
  void observe(std::span<const double> deviations);

  double delta() const { return delta_; }
  double delta_max() const { return delta_max_; }
  const ThresholdParams& params() const { return params_; }

 private:
  void update_once(double deviation);

  ThresholdParams params_;
  double delta_ = 1.0;
  double delta_max_ = 0.0;
};

}  // namespace pporpe
