#include "nprg/model.hpp"

#include <cmath>
#include <string>

namespace nprg {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid parameter: ") + what);
}

}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(mass) && mass > 0.0, "mass must be > 0");
  require(std::isfinite(hbar) && hbar > 0.0, "hbar must be > 0");
  require(std::isfinite(omega0) && omega0 > 0.0, "omega0 must be > 0");
  require(std::isfinite(lambda0) && lambda0 > 0.0, "lambda0 must be > 0");
  require(std::isfinite(eta) && eta >= 0.0, "eta must be >= 0");
  require(std::isfinite(cutoff) && cutoff > 0.0, "cutoff must be > 0");
}

DimensionlessParams reduce(const ModelParams& p) {
  p.validate();
  const double lam_unit = p.mass * p.mass * p.omega0 * p.omega0 * p.omega0 / p.hbar;
  return DimensionlessParams{
      .lam = p.lambda0 / lam_unit,
      .etabar = p.eta / (p.mass * p.omega0),
      .cutbar = p.cutoff / p.omega0,
  };
}

ModelParams expand(const DimensionlessParams& d, double mass, double hbar, double omega0) {
  const double lam_unit = mass * mass * omega0 * omega0 * omega0 / hbar;
  ModelParams p{
      .mass = mass,
      .hbar = hbar,
      .omega0 = omega0,
      .lambda0 = d.lam * lam_unit,
      .eta = d.etabar * mass * omega0,
      .cutoff = d.cutbar * omega0,
  };
  p.validate();
  return p;
}

bool PotentialGrid::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

void PotentialGrid::validate() const {
  if (n < 32 || qmax <= 0.0 || !std::isfinite(qmax))
    throw std::invalid_argument("invalid grid: need n >= 32 and qmax > 0");
  if (static_cast<int>(values.size()) != n)
    throw std::invalid_argument("invalid grid: values.size() != n");
  if (!all_finite()) throw std::invalid_argument("invalid grid: non-finite value");
}

PotentialGrid bare_potential(double lam, double qmax, int n) {
  if (!(lam > 0.0) || !std::isfinite(lam))
    throw std::invalid_argument("invalid parameter: lam must be > 0");
  if (n < 32 || qmax <= 0.0 || !std::isfinite(qmax))
    throw std::invalid_argument("invalid grid: need n >= 32 and qmax > 0");
  PotentialGrid g{.qmax = qmax, .n = n, .values = std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double q = g.q(i);
    const double q2 = q * q;
    g.values[i] = -0.5 * q2 + lam * q2 * q2;
  }
  return g;
}

double r_ratio(double lam) {
  if (!(lam > 0.0) || !std::isfinite(lam))
    throw std::invalid_argument("invalid parameter: lam must be > 0");
  return 8.0 * std::sqrt(2.0) * lam;
}

}  // namespace nprg
