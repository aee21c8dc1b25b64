#pragma once
// Physical quantities extracted from a terminated flow: effective frequency,
// effective quartic coupling, and the localization susceptibility
// chi = 1 / (M w_eff^2).

#include "nprg/flow.hpp"
#include "nprg/model.hpp"

namespace nprg {

// |Vbar''(0)| below this is too close to the transition for the polynomial
// fit / stencil cross-check to be meaningful.
inline constexpr double kNearCriticalCurvature = 1e-3;

struct Observables {
  double omega_eff_sq{};          // Vbar''(0) from the even-polynomial fit
  double lambda_eff{};            // quartic coefficient of the fit
  double chi{};                   // 1 / omega_eff_sq when valid, NaN otherwise
  bool valid{};                   // converged flow with positive curvature
  bool near_critical{};           // |Vbar''(0)| < kNearCriticalCurvature
  double stencil_curvature{};     // direct Vbar''(0) for cross-checking
  double fit_stencil_rel_dev{};   // |fit - stencil| / |stencil|
};

// Least-squares fit of a + b*qbar^2 + c*qbar^4 over the innermost fit_window
// grid points; omega_eff_sq = 2b, lambda_eff = c.
Observables effective_couplings(const FlowOutcome& outcome, int fit_window = 9);

// Dimensionless chi-bar = 1 / omega_eff_sq. Throws std::domain_error when the
// observables are invalid.
double susceptibility(const Observables& obs);

// Physical chi = chi-bar / (M w0^2).
double susceptibility(const Observables& obs, const ModelParams& units);

}  // namespace nprg
