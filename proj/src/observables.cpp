#include "nprg/observables.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nprg {

namespace {

// Solve the 3x3 normal equations for y ~ a + b x + c x^2 with x = qbar^2,
// x rescaled to its maximum to keep the system well conditioned.
std::array<double, 3> even_poly_fit(const PotentialGrid& grid, int m) {
  const double s = grid.q(m - 1) * grid.q(m - 1);
  double sx[5] = {0, 0, 0, 0, 0};
  double sy[3] = {0, 0, 0};
  for (int i = 0; i < m; ++i) {
    const double x = grid.q(i) * grid.q(i) / s;
    const double y = grid.values[i];
    double xp = 1.0;
    for (int p = 0; p < 5; ++p, xp *= x) sx[p] += xp;
    sy[0] += y;
    sy[1] += y * x;
    sy[2] += y * x * x;
  }
  double a[3][4] = {{sx[0], sx[1], sx[2], sy[0]},
                    {sx[1], sx[2], sx[3], sy[1]},
                    {sx[2], sx[3], sx[4], sy[2]}};
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    for (int c = col; c < 4; ++c) std::swap(a[col][c], a[piv][c]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 3> coef{};
  for (int r = 2; r >= 0; --r) {
    double acc = a[r][3];
    for (int c = r + 1; c < 3; ++c) acc -= a[r][c] * coef[c];
    coef[r] = acc / a[r][r];
  }
  coef[1] /= s;       // b
  coef[2] /= s * s;   // c
  return coef;
}

}  // namespace

Observables effective_couplings(const FlowOutcome& outcome, int fit_window) {
  outcome.potential.validate();
  if (fit_window < 5 || fit_window > outcome.potential.n)
    throw std::invalid_argument("invalid parameter: fit_window must be in [5, n]");

  const auto coef = even_poly_fit(outcome.potential, fit_window);
  const std::vector<double> curv = curvature_field(outcome.potential);

  Observables obs;
  obs.omega_eff_sq = 2.0 * coef[1];
  obs.lambda_eff = coef[2];
  obs.stencil_curvature = curv[0];
  obs.fit_stencil_rel_dev =
      std::abs(obs.omega_eff_sq - curv[0]) / std::max(std::abs(curv[0]), 1e-300);
  obs.near_critical = std::abs(curv[0]) < kNearCriticalCurvature;
  obs.valid = outcome.stop_reason == StopReason::converged && obs.omega_eff_sq > 0.0;
  obs.chi = obs.valid ? 1.0 / obs.omega_eff_sq : std::numeric_limits<double>::quiet_NaN();
  return obs;
}

double susceptibility(const Observables& obs) {
  if (!obs.valid || !(obs.omega_eff_sq > 0.0))
    throw std::domain_error("invalid observables: omega_eff_sq must be > 0 on a converged flow");
  return 1.0 / obs.omega_eff_sq;
}

double susceptibility(const Observables& obs, const ModelParams& units) {
  units.validate();
  return susceptibility(obs) / (units.mass * units.omega0 * units.omega0);
}

}  // namespace nprg
