#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nprg/scan.hpp"

using namespace nprg;

namespace {

ScanTable synthetic_table(double amplitude, double eta_c, double gamma,
                          const std::vector<double>& etas) {
  ScanTable t;
  t.lam = 1.0;
  for (double e : etas) {
    ScanRecord r;
    r.etabar = e;
    r.stop_reason = StopReason::converged;
    r.chi = amplitude * std::pow(eta_c - e, -gamma);
    r.omega_eff_sq = 1.0 / r.chi;
    t.records.push_back(r);
  }
  return t;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("power-law fit recovers noiseless parameters") {
  const ScanTable t = synthetic_table(2.0, 7.0, 1.5, linspace(1.0, 6.8, 20));
  const FitResult fit = power_law_fit(t, {.chi_ratio = 0.0, .chi_ratio_hi = 0.0});
  CHECK(fit.eta_c == doctest::Approx(7.0).epsilon(1e-6));
  CHECK(fit.gamma == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.residual < 1e-8);
  CHECK(fit.points_used == 20);
  CHECK(fit.eta_c > fit.window_hi);
  CHECK(fit.stable);
}

TEST_CASE("unit exponent gives a log-log slope of exactly minus one") {
  const ScanTable t = synthetic_table(1.0, 10.0, 1.0, linspace(2.0, 9.5, 12));
  const FitResult fit = power_law_fit(t, {.chi_ratio = 0.0, .chi_ratio_hi = 0.0});
  CHECK(fit.gamma == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(fit.eta_c == doctest::Approx(10.0).epsilon(1e-7));
}

TEST_CASE("refitting with recovered parameters reproduces the table") {
  const ScanTable t = synthetic_table(0.7, 12.0, 2.2, linspace(3.0, 11.5, 15));
  const FitResult fit = power_law_fit(t, {.chi_ratio = 0.0, .chi_ratio_hi = 0.0});
  const ScanTable regen =
      synthetic_table(fit.amplitude, fit.eta_c, fit.gamma, linspace(3.0, 11.5, 15));
  for (std::size_t i = 0; i < t.records.size(); ++i)
    CHECK(regen.records[i].chi ==
          doctest::Approx(t.records[i].chi).epsilon(10 * std::max(fit.residual, 1e-9)));
}

TEST_CASE("fit rejects thin or non-divergent data") {
  const ScanTable thin = synthetic_table(2.0, 7.0, 1.5, linspace(1.0, 6.0, 5));
  CHECK_THROWS_AS(power_law_fit(thin, {.chi_ratio = 0.0, .chi_ratio_hi = 0.0}),
                  InsufficientDataError);

  ScanTable censored;
  censored.lam = 1.0;
  for (double e : linspace(1.0, 6.0, 8)) {
    ScanRecord r;
    r.etabar = e;
    r.stop_reason = StopReason::spinodal;
    r.chi = std::numeric_limits<double>::quiet_NaN();
    censored.records.push_back(r);
  }
  CHECK_THROWS_AS(power_law_fit(censored, {}), InsufficientDataError);

  // chi shrinking away from any divergence has no interior optimum
  ScanTable decaying;
  decaying.lam = 1.0;
  for (double e : linspace(1.0, 6.0, 10)) {
    ScanRecord r;
    r.etabar = e;
    r.stop_reason = StopReason::converged;
    r.chi = 2.0 / e;
    r.omega_eff_sq = e / 2.0;
    decaying.records.push_back(r);
  }
  CHECK_THROWS_AS(power_law_fit(decaying, {.chi_ratio = 0.0, .chi_ratio_hi = 0.0}),
                  DegenerateFitError);
}

TEST_CASE("window policy trims both ends") {
  std::vector<double> etas = linspace(0.0, 9.0, 10);
  ScanTable t = synthetic_table(1.0, 10.0, 1.0, etas);  // chi = 1/(10-e): 0.1 .. 1
  const WindowPolicy policy{.chi_ratio = 2.0, .chi_ratio_hi = 5.0, .check_robustness = false};
  // base chi = 0.1; window keeps 0.2 <= chi <= 0.5, i.e. eta in {5, .., 8}
  CHECK_THROWS_AS(power_law_fit(t, policy), InsufficientDataError);  // only 4 points

  t = synthetic_table(1.0, 10.0, 1.0, linspace(0.0, 9.0, 19));
  const FitResult fit = power_law_fit(t, policy);
  CHECK(fit.points_used == 7);
  CHECK(fit.window_lo >= 5.0);
  CHECK(fit.window_hi <= 8.0);
  CHECK(fit.gamma == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("instanton baseline is linear in the coupling") {
  CHECK(instanton_baseline(1.0) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(instanton_baseline(0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(instanton_baseline(1e-12) < 1e-11);
  CHECK_THROWS_AS(instanton_baseline(0.0), std::invalid_argument);
}

TEST_CASE("eta sweep validates its grid") {
  const std::vector<double> bad_order{0.0, 1.0, 0.5};
  CHECK_THROWS_AS(eta_sweep(1.0, bad_order, {}), std::invalid_argument);
  const std::vector<double> negative{-1.0, 1.0};
  CHECK_THROWS_AS(eta_sweep(1.0, negative, {}), std::invalid_argument);
  CHECK_THROWS_AS(eta_sweep(-1.0, std::vector<double>{0.0}, {}), std::invalid_argument);
}

TEST_CASE("eta sweep records converged and censored points in place") {
  const std::vector<double> etas{0.0, 1.0, 1000.0};
  const ScanTable t = eta_sweep(1.0, etas, {});
  REQUIRE(t.records.size() == 3);
  CHECK(t.records[0].converged());
  CHECK(t.records[0].chi > 0.0);
  CHECK(t.records[1].converged());
  CHECK(t.records[1].chi > t.records[0].chi);
  CHECK_FALSE(t.records[2].converged());
  CHECK(std::isnan(t.records[2].chi));
  for (std::size_t i = 1; i < t.records.size(); ++i)
    CHECK(t.records[i].etabar > t.records[i - 1].etabar);
}

TEST_CASE("susceptibility rises monotonically with dissipation") {
  const std::vector<double> etas{0.0, 1.0, 2.0, 4.0};
  const ScanTable t = eta_sweep(1.0, etas, {});
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    REQUIRE(t.records[i].converged());
    CHECK(t.records[i].chi > t.records[i - 1].chi);
  }
}

TEST_CASE("grid settings are validated") {
  EtaGridSettings g;
  g.bisections = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = EtaGridSettings{};
  g.ladder_depth = 1.5;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = EtaGridSettings{};
  g.cap_factor = 0.5;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
