#include <doctest.h>

#include <cmath>

#include "nprg/spectral.hpp"

using namespace nprg;

namespace {

// Frozen by a refinement study of the diagonalization itself (basis_size up
// to 8192, box up to 10): the eta = 0 anchor values for lam = 1.
constexpr double kGapLam1 = 1.5057717;
constexpr double kChiLam1 = 0.43353683;

}  // namespace

TEST_CASE("harmonic oscillator spectrum to 1e-6") {
  SpectralSettings s;
  const SpectralResult res =
      diagonalize_potential([](double q) { return 0.5 * q * q; }, 0.0, s);
  CHECK(res.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(res.eigenvalues[1] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(res.eigenvalues[2] == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(res.gap == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.wall_density < 1e-10);
}

TEST_CASE("tilted harmonic oscillator completes the square") {
  SpectralSettings s;
  const double j = 0.25;
  const SpectralResult res =
      diagonalize_potential([](double q) { return 0.5 * q * q; }, j, s);
  CHECK(res.eigenvalues[0] == doctest::Approx(0.5 - 0.5 * j * j).epsilon(1e-6));
}

TEST_CASE("harmonic susceptibility equals the inverse curvature") {
  SpectralSettings s;
  CHECK(exact_susceptibility_potential([](double q) { return 0.5 * q * q; }, s) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(exact_susceptibility_potential([](double q) { return 2.0 * q * q; }, s) ==
        doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("ground energy is even in the source") {
  SpectralSettings s;
  const double d = s.tilt;
  const double ep = diagonalize(1.0, +d, s).eigenvalues[0];
  const double em = diagonalize(1.0, -d, s).eigenvalues[0];
  CHECK(std::abs(ep - em) < 1e-10 * std::abs(ep));
}

TEST_CASE("double-well anchor values are refinement-stable") {
  SpectralSettings s;
  const SpectralResult base = oracle_summary(1.0, s);
  CHECK(base.gap == doctest::Approx(kGapLam1).epsilon(1e-6));
  CHECK(base.chi == doctest::Approx(kChiLam1).epsilon(1e-5));

  SpectralSettings fine = s;
  fine.basis_size = 4096;
  const SpectralResult refined = diagonalize(1.0, 0.0, fine);
  CHECK(std::abs(refined.gap - base.gap) < 1e-6);

  SpectralSettings wide = s;
  wide.box_halfwidth = 10.0;
  wide.basis_size = 2560;  // keeps the grid spacing comparable
  const SpectralResult wider = diagonalize(1.0, 0.0, wide);
  CHECK(std::abs(wider.gap - base.gap) < 1e-6);
}

TEST_CASE("enlarging the basis or box never raises the ground state appreciably") {
  SpectralSettings s;
  s.basis_size = 512;
  const double e512 = diagonalize(0.5, 0.0, s).eigenvalues[0];
  s.basis_size = 1024;
  const double e1024 = diagonalize(0.5, 0.0, s).eigenvalues[0];
  s.basis_size = 2048;
  const double e2048 = diagonalize(0.5, 0.0, s).eigenvalues[0];
  CHECK(e1024 <= e512 + 1e-6);
  CHECK(e2048 <= e1024 + 1e-6);
  CHECK(std::abs(e2048 - e1024) <= std::abs(e1024 - e512) + 1e-12);

  s.basis_size = 2048;
  s.box_halfwidth = 10.0;
  const double ewide = diagonalize(0.5, 0.0, s).eigenvalues[0];
  CHECK(ewide <= e2048 + 1e-6);
}

TEST_CASE("a box that clips the state is rejected") {
  SpectralSettings s;
  CHECK_THROWS_AS(
      diagonalize_potential([](double q) { return 0.5 * 5e-3 * q * q; }, 0.0, s),
      BoxTooSmallError);
  CHECK_THROWS_AS(diagonalize(0.01, 0.0, s), std::invalid_argument);  // wells outside L/2
}

TEST_CASE("spectral settings are validated") {
  SpectralSettings s;
  s.basis_size = 100;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = SpectralSettings{};
  s.tilt = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = SpectralSettings{};
  s.eigencount = 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("oracle is deterministic") {
  SpectralSettings s;
  const SpectralResult a = oracle_summary(0.3, s);
  const SpectralResult b = oracle_summary(0.3, s);
  CHECK(a.gap == b.gap);
  CHECK(a.chi == b.chi);
  CHECK(a.eigenvalues == b.eigenvalues);
}
