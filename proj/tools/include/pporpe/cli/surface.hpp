#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pporpe::cli {

struct SurfaceOptions {
  double rho_min = 0.0;
  double rho_max = 3.0;
  double step = 1e-3;
  double epsilon = 0.2;
  double beta = 0.5;
  double eta = 0.3;
  double advantage = 1.0;

  /// Throws ConfigError for an empty or oversized grid or an invalid (beta, epsilon).
  void validate() const;
};

/// One row of the loss-surface table. Negative losses are per-sample
/// objectives (rho A for the plain ratio, rho_ppo A for the clipped forms,
/// rho A^RPE for RPE); the a_tilde columns are their derivatives in rho.
struct SurfaceRow {
  double rho = 0.0;
  double rho_beta = 0.0;
  double unregularized = 0.0;
  double ppo = 0.0;
  double ppo_rb = 0.0;
  double rpe = 0.0;
  double a_tilde_ppo = 0.0;
  double a_tilde_ppo_rb = 0.0;
  double a_tilde_rpe = 0.0;
  std::string marker;  // empty for grid rows
};

SurfaceRow surface_row(double rho, const SurfaceOptions& options, std::string marker = {});

/// Grid rows plus marker rows at rho = 1 ("center") and at the PPO and RPE
/// threshold ratios for both advantage signs, sorted by rho.
std::vector<SurfaceRow> compute_surface(const SurfaceOptions& options);

void write_surface(std::ostream& out, const std::vector<SurfaceRow>& rows);

}  // namespace pporpe::cli
