#include "nprg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nprg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Explicit RK4 stability limit for the linearized diffusion term:
// dt <= 2.785 * (3/16) * h^2 * 2pi * lambda * A.
constexpr double kCflBound = 3.28;
constexpr double kCurvatureFloor = 1e-12;

struct Workspace {
  std::vector<double> curv, k1, k2, k3, k4, tmp;
  void resize(std::size_t n) {
    curv.resize(n);
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    tmp.resize(n);
  }
};

// Curvature + flow rate at one stage; returns the smallest log argument.
double eval_stage(std::span<const double> y, double h, double lambda, double etabar,
                  std::span<double> curv, std::span<double> k, kernels::Backend backend) {
  kernels::curvature(y, h, curv, backend);
  return kernels::flow_rate(curv, lambda, etabar, k, backend);
}

// Locate the first grid point at or below the spinodal threshold.
double spinodal_q_from(std::span<const double> curv, double lambda, double etabar, double eps,
                       double h) {
  const double base = 1.0 + etabar / lambda;
  const double inv_l2 = 1.0 / (lambda * lambda);
  for (std::size_t i = 0; i < curv.size(); ++i) {
    if (base + curv[i] * inv_l2 <= eps) return h * static_cast<double>(i);
  }
  return 0.0;
}

double origin_second_derivative(std::span<const double> f, double h) {
  return (-30.0 * f[0] + 32.0 * f[1] - 2.0 * f[2]) / (12.0 * h * h);
}

struct StepResult {
  bool spinodal{false};
  double q{};
  double lambda{};
  double amin{std::numeric_limits<double>::infinity()};
};

// One RK4 step of size dt; y is updated only if all four stages stay clear of
// the spinodal. k1 must already hold the rate at (y, lambda).
StepResult rk4_step(std::vector<double>& y, double h, double lambda, double dt, double etabar,
                    double eps, Workspace& ws, kernels::Backend backend) {
  StepResult res;
  const double l_mid = lambda * std::exp(-0.5 * dt);
  const double l_end = lambda * std::exp(-dt);

  auto stage = [&](std::span<const double> state, double l, std::span<double> k) {
    const double amin = eval_stage(state, h, l, etabar, ws.curv, k, backend);
    res.amin = std::min(res.amin, amin);
    if (amin <= eps) {
      res.spinodal = true;
      res.q = spinodal_q_from(ws.curv, l, etabar, eps, h);
      res.lambda = l;
      return false;
    }
    return true;
  };

  kernels::axpy(y, 0.5 * dt, ws.k1, ws.tmp, backend);
  if (!stage(ws.tmp, l_mid, ws.k2)) return res;
  kernels::axpy(y, 0.5 * dt, ws.k2, ws.tmp, backend);
  if (!stage(ws.tmp, l_mid, ws.k3)) return res;
  kernels::axpy(y, dt, ws.k3, ws.tmp, backend);
  if (!stage(ws.tmp, l_end, ws.k4)) return res;
  kernels::rk4_combine(y, dt, ws.k1, ws.k2, ws.k3, ws.k4, backend);
  return res;
}

}  // namespace

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::reached_t_max: return "reached_t_max";
    case StopReason::spinodal: return "spinodal";
  }
  return "unknown";
}

SpinodalError::SpinodalError(double q_, double lambda_)
    : std::runtime_error("spinodal reached at qbar=" + std::to_string(q_) +
                         ", lambda=" + std::to_string(lambda_)),
      q(q_),
      lambda(lambda_) {}

void FlowSettings::validate() const {
  if (!(t_max > 0.0)) throw std::invalid_argument("invalid parameter: t_max must be > 0");
  if (!(dt > 0.0 && dt < 0.1))
    throw std::invalid_argument("invalid parameter: dt must be in (0, 0.1)");
  if (stencil_order != 4)
    throw std::invalid_argument("invalid parameter: stencil_order is fixed at 4");
  if (!(spinodal_eps > 0.0))
    throw std::invalid_argument("invalid parameter: spinodal_eps must be > 0");
  if (!(convergence_tol > 0.0))
    throw std::invalid_argument("invalid parameter: convergence_tol must be > 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
    throw std::invalid_argument("invalid parameter: cfl_safety must be in (0, 1]");
  if (trace_stride < 1) throw std::invalid_argument("invalid parameter: trace_stride must be >= 1");
  if (max_steps < 1000)
    throw std::invalid_argument("invalid parameter: max_steps must be >= 1000");
}

double flow_rhs(double lambda, double etabar, double curvature, double spinodal_eps) {
  if (!(lambda > 0.0)) throw std::invalid_argument("invalid parameter: lambda must be > 0");
  const double a = 1.0 + etabar / lambda + curvature / (lambda * lambda);
  if (a <= spinodal_eps) throw SpinodalError(std::numeric_limits<double>::quiet_NaN(), lambda);
  return lambda / kTwoPi * std::log(a);
}

std::vector<double> curvature_field(const PotentialGrid& grid, kernels::Backend backend) {
  grid.validate();
  std::vector<double> out(grid.values.size());
  kernels::curvature(grid.values, grid.h(), out, backend);
  return out;
}

PotentialGrid step(const PotentialGrid& state, double lambda, double dt, double etabar,
                   const FlowSettings& settings) {
  state.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("invalid parameter: lambda must be > 0");
  PotentialGrid out = state;
  Workspace ws;
  ws.resize(state.values.size());
  const double h = state.h();
  const double amin =
      eval_stage(out.values, h, lambda, etabar, ws.curv, ws.k1, settings.backend);
  if (amin <= settings.spinodal_eps)
    throw SpinodalError(spinodal_q_from(ws.curv, lambda, etabar, settings.spinodal_eps, h),
                        lambda);
  const StepResult res = rk4_step(out.values, h, lambda, dt, etabar, settings.spinodal_eps, ws,
                                  settings.backend);
  if (res.spinodal) throw SpinodalError(res.q, res.lambda);
  return out;
}

namespace {

// Adaptive Simpson quadrature, tolerance-controlled.
double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adapt(const F& f, double a, double b, double fa, double fm, double fb, double whole,
             double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fm = f(0.5 * (a + b));
  const double fb = f(b);
  return adapt(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48);
}

}  // namespace

PotentialGrid shell_step(const PotentialGrid& state, double lambda, double dlambda, double etabar,
                         double spinodal_eps, double quad_tol) {
  state.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("invalid parameter: lambda must be > 0");
  if (!(dlambda > 0.0 && dlambda < lambda))
    throw std::invalid_argument("invalid parameter: need 0 < dlambda < lambda");
  const std::vector<double> curv = curvature_field(state);
  const double lo = lambda - dlambda;
  PotentialGrid out = state;
  for (int i = 0; i < state.n; ++i) {
    const double c = curv[i];
    auto arg = [&](double w) { return 1.0 + etabar / w + c / (w * w); };
    // The argument is monotone between its endpoints on the shell.
    if (arg(lo) <= spinodal_eps || arg(lambda) <= spinodal_eps)
      throw SpinodalError(state.q(i), lo);
    auto f = [&](double w) { return std::log(arg(w)); };
    out.values[i] += integrate(f, lo, lambda, quad_tol) / kTwoPi;
  }
  return out;
}

FlowOutcome run_flow(const DimensionlessParams& params, const FlowSettings& settings,
                     const PotentialGrid& initial) {
  settings.validate();
  initial.validate();
  if (!(params.cutbar > 0.0)) throw std::invalid_argument("invalid parameter: cutbar must be > 0");
  if (!(params.etabar >= 0.0)) throw std::invalid_argument("invalid parameter: etabar must be >= 0");

  const double h = initial.h();
  const std::size_t n = initial.values.size();
  const double eps = settings.spinodal_eps;
  const auto backend = settings.backend;

  Workspace ws;
  ws.resize(n);

  FlowOutcome out;
  out.potential = initial;
  std::vector<double>& y = out.potential.values;
  out.min_log_argument = std::numeric_limits<double>::infinity();

  double t = 0.0;
  double lambda = params.cutbar;
  long macro = 0;
  bool done = false;

  auto push_trace = [&](double t_, double lambda_, double vpp0_) {
    if (!out.curvature_trace.empty() && out.curvature_trace.back().t == t_) return;
    out.curvature_trace.push_back({t_, lambda_, vpp0_});
  };

  while (!done) {
    double amin = eval_stage(y, h, lambda, params.etabar, ws.curv, ws.k1, backend);
    out.min_log_argument = std::min(out.min_log_argument, amin);
    const double vpp0 = ws.curv[0];
    if (amin <= eps) {
      out.stop_reason = StopReason::spinodal;
      out.spinodal_q = spinodal_q_from(ws.curv, lambda, params.etabar, eps, h);
      out.spinodal_lambda = lambda;
      push_trace(t, lambda, vpp0);
      break;
    }
    if (macro % settings.trace_stride == 0) push_trace(t, lambda, vpp0);

    // Instantaneous curvature rate at the origin from the rate field itself;
    // a finite difference of successive Vbar''(0) would sit below the
    // stencil rounding floor long before reaching convergence_tol.
    const double rate0 = origin_second_derivative(ws.k1, h);
    if (macro > 0 &&
        std::abs(rate0) <= settings.convergence_tol * std::max(std::abs(vpp0), kCurvatureFloor)) {
      out.stop_reason = StopReason::converged;
      push_trace(t, lambda, vpp0);
      break;
    }
    if (t >= settings.t_max * (1.0 - 1e-12)) {
      out.stop_reason = StopReason::reached_t_max;
      push_trace(t, lambda, vpp0);
      break;
    }

    const double dt_macro = std::min(settings.dt, settings.t_max - t);
    double remaining = dt_macro;
    bool fresh_k1 = true;
    while (remaining > 1e-15 * dt_macro) {
      if (!fresh_k1) {
        amin = eval_stage(y, h, lambda, params.etabar, ws.curv, ws.k1, backend);
        out.min_log_argument = std::min(out.min_log_argument, amin);
        if (amin <= eps) {
          out.stop_reason = StopReason::spinodal;
          out.spinodal_q = spinodal_q_from(ws.curv, lambda, params.etabar, eps, h);
          out.spinodal_lambda = lambda;
          push_trace(t, lambda, ws.curv[0]);
          done = true;
          break;
        }
      }
      const double dt_stable = settings.cfl_safety * kCflBound * h * h * lambda * amin;
      double dt_sub = remaining;
      if (dt_stable < remaining) {
        const double m = std::ceil(remaining / dt_stable);
        dt_sub = remaining / m;
        ++out.substeps;
      }
      const StepResult res =
          rk4_step(y, h, lambda, dt_sub, params.etabar, eps, ws, backend);
      out.min_log_argument = std::min(out.min_log_argument, res.amin);
      if (res.spinodal) {
        out.stop_reason = StopReason::spinodal;
        out.spinodal_q = res.q;
        out.spinodal_lambda = res.lambda;
        kernels::curvature(y, h, ws.curv, backend);
        push_trace(t, lambda, ws.curv[0]);
        done = true;
        break;
      }
      t += dt_sub;
      lambda = params.cutbar * std::exp(-t);
      remaining -= dt_sub;
      ++out.steps;
      fresh_k1 = false;
      if (out.steps >= settings.max_steps) {
        out.stop_reason = StopReason::reached_t_max;
        kernels::curvature(y, h, ws.curv, backend);
        push_trace(t, lambda, ws.curv[0]);
        done = true;
        break;
      }
    }
    ++macro;
  }

  out.lambda_final = lambda;
  out.t_final = t;
  return out;
}

FlowOutcome run_flow(const DimensionlessParams& params, const FlowSettings& settings, double qmax,
                     int n) {
  return run_flow(params, settings, bare_potential(params.lam, qmax, n));
}

}  // namespace nprg
