#include <doctest.h>

#include <cmath>
#include <vector>

#include "nprg/observables.hpp"

using namespace nprg;

namespace {

FlowOutcome synthetic_outcome(double (*f)(double), StopReason reason) {
  FlowOutcome out;
  out.potential = PotentialGrid{.qmax = 3.0, .n = 301, .values = std::vector<double>(301)};
  for (int i = 0; i < 301; ++i) out.potential.values[i] = f(out.potential.q(i));
  out.stop_reason = reason;
  out.lambda_final = 1e-10;
  return out;
}

double harmonic(double q) { return 0.5 * q * q; }
double double_well(double q) { return -0.5 * q * q + q * q * q * q; }
double shallow(double q) { return 0.5 * 5e-4 * q * q; }

}  // namespace

TEST_CASE("quadratic potential yields unit curvature and unit chi") {
  const Observables obs = effective_couplings(synthetic_outcome(harmonic, StopReason::converged));
  CHECK(obs.omega_eff_sq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(obs.lambda_eff) < 1e-10);
  CHECK(obs.valid);
  CHECK_FALSE(obs.near_critical);
  CHECK(obs.chi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(obs.chi * obs.omega_eff_sq - 1.0) <= 3e-16);
  CHECK(susceptibility(obs) == obs.chi);
}

TEST_CASE("negative curvature invalidates the observables") {
  const Observables obs =
      effective_couplings(synthetic_outcome(double_well, StopReason::converged));
  CHECK(obs.omega_eff_sq == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(obs.lambda_eff == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_FALSE(obs.valid);
  CHECK(std::isnan(obs.chi));
  CHECK_THROWS_AS(susceptibility(obs), std::domain_error);
}

TEST_CASE("non-converged flows carry no susceptibility") {
  const Observables obs =
      effective_couplings(synthetic_outcome(harmonic, StopReason::reached_t_max));
  CHECK_FALSE(obs.valid);
  CHECK(std::isnan(obs.chi));
  CHECK_THROWS_AS(susceptibility(obs), std::domain_error);

  const Observables sp = effective_couplings(synthetic_outcome(harmonic, StopReason::spinodal));
  CHECK_FALSE(sp.valid);
}

TEST_CASE("near-critical curvature is flagged") {
  const Observables obs = effective_couplings(synthetic_outcome(shallow, StopReason::converged));
  CHECK(obs.valid);
  CHECK(obs.near_critical);
  CHECK(obs.omega_eff_sq == doctest::Approx(5e-4).epsilon(1e-8));
}

TEST_CASE("reciprocal and unit restoration") {
  Observables obs;
  obs.valid = true;
  obs.omega_eff_sq = 0.25;
  obs.chi = 4.0;
  CHECK(susceptibility(obs) == doctest::Approx(4.0).epsilon(1e-15));
  const ModelParams units{.mass = 1, .hbar = 1, .omega0 = 1, .lambda0 = 1, .eta = 0,
                          .cutoff = 1e4};
  CHECK(susceptibility(obs, units) == doctest::Approx(4.0).epsilon(1e-15));

  const ModelParams scaled{.mass = 2, .hbar = 1, .omega0 = 3, .lambda0 = 1, .eta = 0,
                           .cutoff = 1e4};
  CHECK(susceptibility(obs, scaled) ==
        doctest::Approx(4.0 / (2.0 * 9.0)).epsilon(1e-15));

  // chi-bar grows monotonically as the curvature closes in on zero
  double prev = 0.0;
  for (double w2 : {1.0, 0.1, 0.01, 1e-4}) {
    obs.omega_eff_sq = w2;
    const double chi = susceptibility(obs);
    CHECK(chi > prev);
    prev = chi;
  }
}

TEST_CASE("fit agrees with the direct stencil on a real flow") {
  const FlowOutcome out = run_flow({.lam = 1.0, .etabar = 0.0, .cutbar = 1e4}, {});
  REQUIRE(out.stop_reason == StopReason::converged);
  const Observables obs = effective_couplings(out);
  CHECK(obs.valid);
  CHECK(obs.fit_stencil_rel_dev < 1e-4);

  // window choice barely matters near the origin
  const double w7 = effective_couplings(out, 7).omega_eff_sq;
  const double w9 = effective_couplings(out, 9).omega_eff_sq;
  const double w13 = effective_couplings(out, 13).omega_eff_sq;
  CHECK(std::abs(w7 - w9) / w9 < 1e-4);
  CHECK(std::abs(w13 - w9) / w9 < 1e-4);
}

TEST_CASE("fit window is validated") {
  const FlowOutcome out = synthetic_outcome(harmonic, StopReason::converged);
  CHECK_THROWS_AS(effective_couplings(out, 4), std::invalid_argument);
  CHECK_THROWS_AS(effective_couplings(out, 302), std::invalid_argument);
}
