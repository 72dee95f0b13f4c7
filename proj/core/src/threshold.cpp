#include "pporpe/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "pporpe/errors.hpp"

namespace pporpe {

void ThresholdParams::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("lambda must lie in (0, 1)");
  if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
  if (!(delta_lower > 0.0 && delta_lower < 0.5)) throw ConfigError("delta_lower must lie in (0, 0.5)");
}

ThresholdState::ThresholdState(ThresholdParams params) : params_(params) { params_.validate(); }

double ThresholdState::current_epsilon() const {
  return params_.kappa * std::max(std::min(delta_, params_.delta_upper()), params_.delta_lower);
}

void ThresholdState::update_once(double deviation) {
  delta_max_ = std::max(params_.lambda * delta_max_, deviation);
  delta_ = params_.lambda * delta_ + (1.0 - params_.lambda) * delta_max_;
}

void ThresholdState::observe(std::span<const double> deviations) {
  if (deviations.empty()) return;
  for (double d : deviations) {
    if (!(d >= 0.0) || !std::isfinite(d))
      throw ContractError("threshold deviations must be finite and nonnegative");
  }
  if (params_.per_sample) {
    for (double d : deviations) update_once(d);
  } else {
    update_once(*std::max_element(deviations.begin(), deviations.end()));
  }
}

}  // namespace pporpe
