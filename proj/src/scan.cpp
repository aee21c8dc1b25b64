#include "nprg/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nprg/observables.hpp"

namespace nprg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ScanRecord run_point(double lam, double etabar, const FlowSettings& settings, double qmax,
                     int n, double cutbar) {
  const DimensionlessParams p{.lam = lam, .etabar = etabar, .cutbar = cutbar};
  const FlowOutcome outcome = run_flow(p, settings, qmax, n);
  ScanRecord rec{.etabar = etabar, .stop_reason = outcome.stop_reason, .omega_eff_sq = kNaN,
                 .chi = kNaN};
  if (outcome.stop_reason == StopReason::converged) {
    const Observables obs = effective_couplings(outcome);
    if (obs.valid) {
      rec.omega_eff_sq = obs.omega_eff_sq;
      rec.chi = obs.chi;
    }
  }
  return rec;
}

int effective_jobs(int jobs) {
#ifdef _OPENMP
  return jobs > 0 ? jobs : omp_get_max_threads();
#else
  (void)jobs;
  return 1;
#endif
}

}  // namespace

void EtaGridSettings::validate() const {
  if (!(coarse_step_factor > 0.0))
    throw std::invalid_argument("invalid parameter: coarse_step_factor must be > 0");
  if (!(cap_factor > 1.0)) throw std::invalid_argument("invalid parameter: cap_factor must be > 1");
  if (bisections < 1 || bisections > 60)
    throw std::invalid_argument("invalid parameter: bisections must be in [1, 60]");
  if (ladder_points < 2)
    throw std::invalid_argument("invalid parameter: ladder_points must be >= 2");
  if (!(ladder_depth > 0.0 && ladder_depth < 1.0))
    throw std::invalid_argument("invalid parameter: ladder_depth must be in (0, 1)");
  if (!(ladder_dmin_rel >= 0.0 && ladder_dmin_rel < 1.0))
    throw std::invalid_argument("invalid parameter: ladder_dmin_rel must be in [0, 1)");
}

ScanTable eta_sweep(double lam, std::span<const double> etas, const FlowSettings& settings,
                    double qmax, int n, int jobs, double cutbar) {
  if (!(lam > 0.0)) throw std::invalid_argument("invalid parameter: lam must be > 0");
  settings.validate();
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (!(etas[i] >= 0.0)) throw std::invalid_argument("invalid parameter: eta grid must be >= 0");
    if (i > 0 && !(etas[i] > etas[i - 1]))
      throw std::invalid_argument("invalid parameter: eta grid must be strictly increasing");
  }

  ScanTable table{.lam = lam, .qmax = qmax, .n = n, .cutbar = cutbar, .settings = settings,
                  .records = {}};
  table.records.resize(etas.size());
  const long count = static_cast<long>(etas.size());
  const int threads = effective_jobs(jobs);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (long i = 0; i < count; ++i) {
    table.records[i] = run_point(lam, etas[i], settings, qmax, n, cutbar);
  }
  (void)threads;
  return table;
}

ScanTable refined_scan(double lam, const EtaGridSettings& grid, const FlowSettings& settings,
                       double qmax, int n, int jobs, double cutbar) {
  if (!(lam > 0.0)) throw std::invalid_argument("invalid parameter: lam must be > 0");
  grid.validate();
  settings.validate();

  const double scale = std::max(instanton_baseline(lam), 1.0);
  const double step = grid.coarse_step_factor * scale;
  const double cap = grid.cap_factor * scale;

  // Coarse ladder in parallel batches, extended until a censored point turns
  // up; the batch size keeps the overshoot past the boundary small.
  ScanTable table{.lam = lam, .qmax = qmax, .n = n, .cutbar = cutbar, .settings = settings,
                  .records = {}};
  constexpr int kBatch = 4;
  double e = 0.0;
  long cens = -1;
  while (cens < 0) {
    std::vector<double> batch;
    for (int i = 0; i < kBatch && e <= cap; ++i, e += step) batch.push_back(e);
    if (batch.empty())
      throw std::runtime_error("refined_scan: no censored point found below the eta cap (" +
                               std::to_string(cap) + ")");
    ScanTable part = eta_sweep(lam, batch, settings, qmax, n, jobs, cutbar);
    table.records.insert(table.records.end(), part.records.begin(), part.records.end());
    for (std::size_t i = 0; i < table.records.size(); ++i) {
      if (!table.records[i].converged()) {
        cens = static_cast<long>(i);
        break;
      }
    }
  }
  if (cens == 0)
    throw std::runtime_error("refined_scan: flow is censored already at eta = 0");

  double lo = table.records[cens - 1].etabar;
  double hi = table.records[cens].etabar;

  std::vector<ScanRecord> extra;
  for (int b = 0; b < grid.bisections; ++b) {
    const double mid = 0.5 * (lo + hi);
    ScanRecord rec = run_point(lam, mid, settings, qmax, n, cutbar);
    extra.push_back(rec);
    (rec.converged() ? lo : hi) = mid;
  }

  // Geometric approach ladder from inside the scaling region up to the
  // resolved boundary.
  const double d_max = grid.ladder_depth * hi;
  const double d_min = std::max(hi - lo, grid.ladder_dmin_rel * hi);
  std::vector<double> ladder;
  if (d_min > 0.0 && d_max > d_min) {
    const double ratio = std::pow(d_min / d_max, 1.0 / (grid.ladder_points - 1));
    double d = d_max;
    for (int j = 0; j < grid.ladder_points; ++j, d *= ratio) ladder.push_back(hi - d);
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  }
  ScanTable ladder_table = eta_sweep(lam, ladder, settings, qmax, n, jobs, cutbar);

  table.records.insert(table.records.end(), extra.begin(), extra.end());
  table.records.insert(table.records.end(), ladder_table.records.begin(),
                       ladder_table.records.end());
  std::sort(table.records.begin(), table.records.end(),
            [](const ScanRecord& a, const ScanRecord& b) { return a.etabar < b.etabar; });
  table.records.erase(std::unique(table.records.begin(), table.records.end(),
                                  [](const ScanRecord& a, const ScanRecord& b) {
                                    return a.etabar == b.etabar;
                                  }),
                      table.records.end());
  return table;
}

namespace {

struct Regression {
  double slope{}, intercept{}, rms{};
};

// Closed-form least squares of log(chi) on log(eta_c - eta).
Regression loglog_fit(std::span<const ScanRecord> pts, double eta_c) {
  const double m = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const ScanRecord& r : pts) {
    const double x = std::log(eta_c - r.etabar);
    const double y = std::log(r.chi);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  Regression reg;
  const double denom = m * sxx - sx * sx;
  reg.slope = (m * sxy - sx * sy) / denom;
  reg.intercept = (sy - reg.slope * sx) / m;
  double ss = 0;
  for (const ScanRecord& r : pts) {
    const double x = std::log(eta_c - r.etabar);
    const double res = std::log(r.chi) - reg.intercept - reg.slope * x;
    ss += res * res;
  }
  reg.rms = std::sqrt(ss / m);
  return reg;
}

struct ProfiledFit {
  double eta_c{}, gamma{}, amplitude{}, rms{};
};

ProfiledFit profile_eta_c(std::span<const ScanRecord> pts, double lo, double hi) {
  auto rms_at = [&](double c) { return loglog_fit(pts, c).rms; };
  // Golden-section minimization of the profiled RMS residual.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = rms_at(x1), f2 = rms_at(x2);
  for (int it = 0; it < 220 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = rms_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = rms_at(x2);
    }
  }
  const double c = 0.5 * (a + b);
  if (c - lo < 1e-6 * (hi - lo) || hi - c < 1e-6 * (hi - lo))
    throw DegenerateFitError("profiled residual has no interior minimum in eta_c");
  const Regression reg = loglog_fit(pts, c);
  return ProfiledFit{.eta_c = c, .gamma = -reg.slope, .amplitude = std::exp(reg.intercept),
                     .rms = reg.rms};
}

}  // namespace

FitResult power_law_fit(const ScanTable& table, const WindowPolicy& policy) {
  std::vector<ScanRecord> conv;
  for (const ScanRecord& r : table.records)
    if (r.converged() && std::isfinite(r.chi) && r.chi > 0.0) conv.push_back(r);
  if (conv.empty()) throw InsufficientDataError("no converged records to fit");

  std::vector<ScanRecord> window;
  const double chi_base = conv.front().chi;
  for (const ScanRecord& r : conv) {
    if (policy.chi_ratio > 0.0 && r.chi < policy.chi_ratio * chi_base) continue;
    if (policy.chi_ratio_hi > 0.0 && r.chi > policy.chi_ratio_hi * chi_base) continue;
    window.push_back(r);
  }
  if (window.size() < 6)
    throw InsufficientDataError("need >= 6 converged records in the fit window, have " +
                                std::to_string(window.size()));

  const double eta_max = window.back().etabar;
  const double eta_min = window.front().etabar;
  const double lo = eta_max + 1e-9 * std::max(1.0, eta_max);

  // Search up to two window widths past the data.
  double hi = eta_max + 2.0 * (eta_max - eta_min);
  if (!(hi > lo)) throw DegenerateFitError("empty eta_c search interval");

  const ProfiledFit fit = profile_eta_c(window, lo, hi);
  if (!(fit.gamma > 0.0))
    throw DegenerateFitError("fitted exponent is not positive: gamma = " +
                             std::to_string(fit.gamma));

  FitResult res{.eta_c = fit.eta_c, .gamma = fit.gamma, .amplitude = fit.amplitude,
                .residual = fit.rms, .window_lo = eta_min, .window_hi = eta_max,
                .points_used = static_cast<int>(window.size()), .stable = true,
                .stability_delta = 0.0};

  if (policy.check_robustness && window.size() > 6) {
    const std::vector<ScanRecord> trimmed(window.begin() + 1, window.end());
    const ProfiledFit refit = profile_eta_c(trimmed, lo, hi);
    res.stability_delta = std::abs(refit.eta_c - fit.eta_c) / fit.eta_c;
    res.stable = res.stability_delta < 0.01;
  }
  return res;
}

double instanton_baseline(double lam) {
  if (!(lam > 0.0)) throw std::invalid_argument("invalid parameter: lam must be > 0");
  return 2.0 * std::numbers::pi * lam;
}

std::vector<SurfaceRow> critical_surface(std::span<const double> lams, const EtaGridSettings& grid,
                                         const FlowSettings& settings, const WindowPolicy& policy,
                                         double qmax, int n, int jobs, double cutbar) {
  std::vector<SurfaceRow> rows;
  rows.reserve(lams.size());
  for (double lam : lams) {
    SurfaceRow row{.lam = lam, .fit_ok = false, .eta_c = kNaN, .gamma = kNaN, .residual = kNaN,
                   .baseline = instanton_baseline(lam),
                   .low_confidence = r_ratio(lam) <= 1.2, .fit_stable = false,
                   .points_used = 0};
    try {
      const ScanTable table = refined_scan(lam, grid, settings, qmax, n, jobs, cutbar);
      const FitResult fit = power_law_fit(table, policy);
      row.fit_ok = true;
      row.eta_c = fit.eta_c;
      row.gamma = fit.gamma;
      row.residual = fit.residual;
      row.fit_stable = fit.stable;
      row.points_used = fit.points_used;
    } catch (const std::runtime_error&) {
      // recorded in-place as a failed fit
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nprg
