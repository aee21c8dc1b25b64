#pragma once
// Local-potential Wegner-Houghton flow with Ohmic dissipation.
//
// Dimensionless flow in t = ln(Lbar0 / Lbar):
//   dVbar/dt = (Lbar / 2pi) * log(1 + etabar/Lbar + Vbar''/Lbar^2),
// integrated from the initial cutoff toward the infrared by classical RK4 on
// the half-grid (method of lines, 4th-order stencils). The log argument
// reaching zero (spinodal) marks the localized regime and stops the flow.

#include <stdexcept>
#include <vector>

#include "nprg/kernels.hpp"
#include "nprg/model.hpp"

namespace nprg {

enum class StopReason { converged, reached_t_max, spinodal };

const char* to_string(StopReason r);

struct FlowSettings {
  double t_max{50.0};             // flow horizon in t = ln(L0/L)
  double dt{1e-3};                // macro step in t
  int stencil_order{4};           // fixed 4th-order stencils
  double spinodal_eps{1e-8};      // stop once the log argument falls below this
  double convergence_tol{1e-10};  // |d Vbar''(0)/dt| / |Vbar''(0)| threshold
  double cfl_safety{0.5};         // fraction of the explicit stability bound
  int trace_stride{100};          // macro steps between curvature-trace samples
  long max_steps{400000};        // stage budget; critically stalled flows stop
                                  // with reached_t_max once it is spent
  kernels::Backend backend{kernels::default_backend()};

  void validate() const;
};

struct TracePoint {
  double t;
  double lambda;
  double vpp0;  // Vbar''(0)
};

struct FlowOutcome {
  PotentialGrid potential;  // last fully completed state
  double lambda_final{};
  double t_final{};
  StopReason stop_reason{StopReason::reached_t_max};
  double min_log_argument{};  // smallest A seen over the whole flow
  double spinodal_q{};        // set when stop_reason == spinodal
  double spinodal_lambda{};
  long steps{};     // completed RK4 steps, substeps included
  long substeps{};  // steps forced below dt by the stability bound
  std::vector<TracePoint> curvature_trace;
};

// Thrown by the single-step entry points when the log argument drops below
// spinodal_eps; run_flow reports the same condition as a stop reason instead.
struct SpinodalError : std::runtime_error {
  SpinodalError(double q_, double lambda_);
  double q;
  double lambda;
};

// Pointwise flow rate dVbar/dt at scale lambda for one curvature value.
double flow_rhs(double lambda, double etabar, double curvature, double spinodal_eps = 1e-8);

// 4th-order Vbar'' on the half-grid (even extension at the origin,
// one-sided closures at the outer edge).
std::vector<double> curvature_field(const PotentialGrid& grid,
                                    kernels::Backend backend = kernels::default_backend());

// One RK4 step of size dt in t starting at scale lambda. Deterministic;
// throws SpinodalError if any stage evaluation hits the spinodal.
PotentialGrid step(const PotentialGrid& state, double lambda, double dt, double etabar,
                   const FlowSettings& settings = {});

// Reference single shell: dVbar_i = (1/2pi) Int_{lambda-dl}^{lambda} dw
// log(1 + etabar/w + curv_i/w^2) at curvature frozen to the input state,
// evaluated by adaptive quadrature. Used to cross-check `step`.
PotentialGrid shell_step(const PotentialGrid& state, double lambda, double dlambda, double etabar,
                         double spinodal_eps = 1e-8, double quad_tol = 1e-12);

FlowOutcome run_flow(const DimensionlessParams& params, const FlowSettings& settings,
                     const PotentialGrid& initial);

// Convenience: start from the bare double-well potential.
FlowOutcome run_flow(const DimensionlessParams& params, const FlowSettings& settings = {},
                     double qmax = kDefaultQmax, int n = kDefaultGridN);

}  // namespace nprg
