#pragma once
// Dissipation sweeps at fixed coupling, critical power-law fits of the
// localization susceptibility, and the coupling-dependence table
// (eta_c, gamma vs lam).

#include <span>
#include <stdexcept>
#include <vector>

#include "nprg/flow.hpp"
#include "nprg/model.hpp"

namespace nprg {

struct ScanRecord {
  double etabar{};
  StopReason stop_reason{StopReason::reached_t_max};
  double omega_eff_sq{};  // NaN unless converged
  double chi{};           // NaN unless converged
  bool converged() const { return stop_reason == StopReason::converged; }
};

struct ScanTable {
  double lam{};
  double qmax{kDefaultQmax};
  int n{kDefaultGridN};
  double cutbar{kDefaultCutoff};
  FlowSettings settings;             // provenance snapshot
  std::vector<ScanRecord> records;   // strictly increasing etabar
};

// Deterministic grid-refinement recipe: a coarse ladder extended until the
// first censored (non-converged) point, repeated bisection of the
// converged/censored gap, then a geometric approach ladder into the scaling
// region. Near the transition the flow stalls critically before any spinodal
// fires, so censoring keys on convergence, not on the spinodal alone.
struct EtaGridSettings {
  double coarse_step_factor{0.25};  // coarse step = factor * max(2 pi lam, 1)
  double cap_factor{40.0};          // abandon the search past cap * max(2 pi lam, 1)
  int bisections{8};
  int ladder_points{12};
  double ladder_depth{0.35};        // ladder starts at eta = (1 - depth) * boundary
  double ladder_dmin_rel{0.02};     // floor on (boundary - eta)/boundary for ladder points

  void validate() const;
};

struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateFitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One flow per eta value; non-converged outcomes are censored records (no
// chi). jobs = 0 uses all available threads.
ScanTable eta_sweep(double lam, std::span<const double> etas, const FlowSettings& settings,
                    double qmax = kDefaultQmax, int n = kDefaultGridN, int jobs = 0,
                    double cutbar = kDefaultCutoff);

// Full recipe: coarse ladder + bisections + approach ladder, merged sorted.
ScanTable refined_scan(double lam, const EtaGridSettings& grid, const FlowSettings& settings,
                       double qmax = kDefaultQmax, int n = kDefaultGridN, int jobs = 0,
                       double cutbar = kDefaultCutoff);

struct WindowPolicy {
  double chi_ratio{5.0};        // keep chi >= ratio * chi(smallest eta); <= 0 keeps all
  double chi_ratio_hi{100.0};   // drop chi > ratio_hi * chi(smallest eta); <= 0 keeps all
  bool check_robustness{true};  // refit without the farthest point
};

struct FitResult {
  double eta_c{};
  double gamma{};
  double amplitude{};       // C in chi = C |eta - eta_c|^-gamma
  double residual{};        // RMS of the log-log regression
  double window_lo{};       // eta range used
  double window_hi{};
  int points_used{};
  bool stable{true};        // eta_c moves < 1% when the farthest point is dropped
  double stability_delta{};
};

// Profiled fit: golden-section search over eta_c, closed-form log-log
// regression inside. Throws InsufficientDataError / DegenerateFitError.
FitResult power_law_fit(const ScanTable& table, const WindowPolicy& policy = {});

// Dilute-gas instanton prediction 2 pi lam for the critical dissipation.
double instanton_baseline(double lam);

struct SurfaceRow {
  double lam{};
  bool fit_ok{};
  double eta_c{};
  double gamma{};
  double residual{};
  double baseline{};        // 2 pi lam
  bool low_confidence{};    // shallow-barrier regime, r_ratio <= 1.2
  bool fit_stable{};
  int points_used{};
};

std::vector<SurfaceRow> critical_surface(std::span<const double> lams, const EtaGridSettings& grid,
                                         const FlowSettings& settings,
                                         const WindowPolicy& policy = {},
                                         double qmax = kDefaultQmax, int n = kDefaultGridN,
                                         int jobs = 0, double cutbar = kDefaultCutoff);

}  // namespace nprg
