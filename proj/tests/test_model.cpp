#include <doctest.h>

#include <cmath>

#include "nprg/model.hpp"

using namespace nprg;

TEST_CASE("reduce maps physical parameters to the dimensionless set") {
  const DimensionlessParams a = reduce({.mass = 1, .hbar = 1, .omega0 = 1, .lambda0 = 1,
                                        .eta = 0, .cutoff = 1e4});
  CHECK(a.lam == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.etabar == 0.0);
  CHECK(a.cutbar == doctest::Approx(1e4).epsilon(1e-15));

  const DimensionlessParams b = reduce({.mass = 2, .hbar = 1, .omega0 = 1, .lambda0 = 4,
                                        .eta = 2, .cutoff = 1e4});
  CHECK(b.lam == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.etabar == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.cutbar == doctest::Approx(1e4).epsilon(1e-15));

  const DimensionlessParams c = reduce({.mass = 1, .hbar = 1, .omega0 = 2, .lambda0 = 8,
                                        .eta = 2, .cutoff = 2e4});
  CHECK(c.lam == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.etabar == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.cutbar == doctest::Approx(1e4).epsilon(1e-15));
}

TEST_CASE("reduce/expand round-trips to machine precision") {
  const ModelParams sets[] = {
      {.mass = 1.7, .hbar = 0.3, .omega0 = 2.9, .lambda0 = 0.41, .eta = 1.3, .cutoff = 3e4},
      {.mass = 0.02, .hbar = 13.0, .omega0 = 0.11, .lambda0 = 7.7, .eta = 0.0, .cutoff = 55.0},
      {.mass = 3.0, .hbar = 1.0, .omega0 = 1.0, .lambda0 = 9.0, .eta = 6.0, .cutoff = 1e4},
  };
  for (const ModelParams& p : sets) {
    const DimensionlessParams d = reduce(p);
    const ModelParams back = expand(d, p.mass, p.hbar, p.omega0);
    CHECK(back.lambda0 == doctest::Approx(p.lambda0).epsilon(1e-15));
    CHECK(back.eta == doctest::Approx(p.eta).epsilon(1e-15));
    CHECK(back.cutoff == doctest::Approx(p.cutoff).epsilon(1e-15));
  }
}

TEST_CASE("parameter validation names the offending field") {
  ModelParams p;
  p.eta = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), "invalid parameter: eta must be >= 0",
                       std::invalid_argument);
  p = ModelParams{};
  p.omega0 = 0.0;
  CHECK_THROWS_WITH_AS(p.validate(), "invalid parameter: omega0 must be > 0",
                       std::invalid_argument);
  p = ModelParams{};
  p.lambda0 = -0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  CHECK(ModelParams{}.cutoff_is_physical());
  ModelParams low;
  low.cutoff = 50.0;
  CHECK_FALSE(low.cutoff_is_physical());
}

TEST_CASE("bare potential samples -q^2/2 + lam q^4") {
  const PotentialGrid g = bare_potential(1.0);
  CHECK(g.n == 301);
  CHECK(g.values[0] == 0.0);
  CHECK(g.values[100] == doctest::Approx(0.5).epsilon(1e-15));    // qbar = 1
  CHECK(g.values[50] == doctest::Approx(-1.0 / 16).epsilon(1e-15));  // classical minimum
  CHECK(g.all_finite());

  // the classical minimum sits at qbar^2 = 1/(4 lam)
  const PotentialGrid g2 = bare_potential(2.0, 2.0, 401);
  int argmin = 0;
  for (int i = 0; i < g2.n; ++i)
    if (g2.values[i] < g2.values[argmin]) argmin = i;
  CHECK(g2.q(argmin) == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(2e-2));
}

TEST_CASE("bare potential rejects bad grids and couplings") {
  CHECK_THROWS_AS(bare_potential(1.0, 3.0, 31), std::invalid_argument);
  CHECK_THROWS_AS(bare_potential(1.0, 0.0, 301), std::invalid_argument);
  CHECK_THROWS_AS(bare_potential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(bare_potential(-1.0), std::invalid_argument);
}

TEST_CASE("even extension has no odd component at the origin") {
  const PotentialGrid g = bare_potential(0.7);
  // 4th-order first derivative across the origin with mirrored ghosts
  const double h = g.h();
  const double d1 = (-g.values[2] + 8.0 * g.values[1] - 8.0 * g.values[1] + g.values[2]) /
                    (12.0 * h);
  CHECK(std::abs(d1) <= 1e-13);
}

TEST_CASE("r ratio marks the shallow-barrier regime") {
  CHECK(r_ratio(0.1) == doctest::Approx(8.0 * std::sqrt(2.0) * 0.1).epsilon(1e-15));
  CHECK(r_ratio(0.1) > 1.12);
  CHECK(r_ratio(0.1) < 1.14);
  CHECK(r_ratio(1.0 / (8.0 * std::sqrt(2.0))) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r_ratio(1.0) == doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(r_ratio(0.0), std::invalid_argument);
}
