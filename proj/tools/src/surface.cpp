#include "pporpe/cli/surface.hpp"

#include <algorithm>
#include <cmath>

#include "pporpe/cli/config_io.hpp"
#include "pporpe/errors.hpp"
#include "pporpe/surrogate.hpp"

namespace pporpe::cli {

namespace {

constexpr double kMaxRows = 1e7;

double grid_count(const SurfaceOptions& o) {
  return std::floor((o.rho_max - o.rho_min) / o.step + 1e-9) + 1.0;
}

}  // namespace

void SurfaceOptions::validate() const {
  if (!(rho_min >= 0.0) || !(rho_max > rho_min) || !std::isfinite(rho_max))
    throw ConfigError("surface grid needs 0 <= rho-min < rho-max");
  if (!(step > 0.0)) throw ConfigError("surface step must be positive");
  if (grid_count(*this) > kMaxRows) throw ConfigError("surface grid exceeds 1e7 rows");
  if (!std::isfinite(advantage)) throw ConfigError("advantage must be finite");
  SurrogateConfig cfg;
  cfg.method = Method::rpe_fixed;
  cfg.beta = beta;
  cfg.epsilon = epsilon;
  cfg.eta = eta;
  cfg.validate(epsilon, epsilon);
}

SurfaceRow surface_row(double rho, const SurfaceOptions& o, std::string marker) {
  SurfaceRow r;
  r.rho = rho;
  r.rho_beta = relative_ratio(rho, o.beta);
  r.unregularized = rho * o.advantage;
  r.ppo = rho_ppo(rho, o.advantage, o.epsilon, 0.0) * o.advantage;
  r.ppo_rb = rho_ppo(rho, o.advantage, o.epsilon, o.eta) * o.advantage;
  r.rpe = rpe_negative_loss(rho, o.advantage, o.epsilon, o.beta);
  r.a_tilde_ppo = a_tilde_ppo(rho, o.advantage, o.epsilon, 0.0);
  r.a_tilde_ppo_rb = a_tilde_ppo(rho, o.advantage, o.epsilon, o.eta);
  r.a_tilde_rpe = a_tilde_rpe(rho, o.advantage, o.epsilon, o.beta);
  r.marker = std::move(marker);
  return r;
}

std::vector<SurfaceRow> compute_surface(const SurfaceOptions& o) {
  o.validate();
  std::vector<SurfaceRow> rows;
  const auto n = static_cast<long long>(grid_count(o));
  rows.reserve(static_cast<std::size_t>(n) + 5);
  for (long long i = 0; i < n; ++i) rows.push_back(surface_row(o.rho_min + static_cast<double>(i) * o.step, o));

  std::vector<std::pair<double, std::string>> markers{
      {1.0, "center"},
      {1.0 + o.epsilon, "ppo_threshold_pos"},
      {1.0 - o.epsilon, "ppo_threshold_neg"},
      {threshold_ratios(o.epsilon, 1.0, o.beta).rho, "rpe_threshold_pos"},
      {threshold_ratios(o.epsilon, -1.0, o.beta).rho, "rpe_threshold_neg"},
  };
  for (auto& [rho, name] : markers)
    if (rho >= o.rho_min && rho <= o.rho_max) rows.push_back(surface_row(rho, o, name));

  std::stable_sort(rows.begin(), rows.end(),
                   [](const SurfaceRow& a, const SurfaceRow& b) { return a.rho < b.rho; });
  return rows;
}

void write_surface(std::ostream& out, const std::vector<SurfaceRow>& rows) {
  out << "rho,rho_beta,unregularized,ppo,ppo_rb,rpe,a_tilde_ppo,a_tilde_ppo_rb,a_tilde_rpe,marker\n";
  for (const auto& r : rows) {
    out << format_double(r.rho) << ',' << format_double(r.rho_beta) << ','
        << format_double(r.unregularized) << ',' << format_double(r.ppo) << ','
        << format_double(r.ppo_rb) << ',' << format_double(r.rpe) << ','
        << format_double(r.a_tilde_ppo) << ',' << format_double(r.a_tilde_ppo_rb) << ','
        << format_double(r.a_tilde_rpe) << ',' << r.marker << '\n';
  }
}

}  // namespace pporpe::cli
