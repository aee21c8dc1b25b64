#pragma once
// Physical parameters, dimensionless reduction, and the bare double-well
// potential for the dissipative tunneling problem.
//
// All internal computation uses dimensionless variables
//   qbar = q * sqrt(M w0 / hbar),  Vbar = V / (hbar w0),  Lbar = Lambda / w0;
// physical units appear only at the API boundary.

#include <stdexcept>
#include <vector>

namespace nprg {

inline constexpr double kDefaultQmax = 3.0;
inline constexpr int kDefaultGridN = 301;
inline constexpr double kDefaultCutoff = 1e4;
inline constexpr double kCutoffRatioFloor = 1e2;  // Lambda0/w0 below this is unphysical

struct ModelParams {
  double mass{1.0};               // M
  double hbar{1.0};               // action scale
  double omega0{1.0};             // bare well frequency, > 0
  double lambda0{1.0};            // quartic coupling [M^2 w0^3 / hbar]
  double eta{0.0};                // Ohmic friction [M w0], >= 0
  double cutoff{kDefaultCutoff};  // initial cutoff [w0]

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool cutoff_is_physical() const { return cutoff >= kCutoffRatioFloor * omega0; }
};

struct DimensionlessParams {
  double lam{1.0};                // hbar lambda0 / (M^2 w0^3)
  double etabar{0.0};             // eta / (M w0)
  double cutbar{kDefaultCutoff};  // Lambda0 / w0
};

DimensionlessParams reduce(const ModelParams& p);

// Inverse of reduce for a given unit system (mass, hbar, omega0).
ModelParams expand(const DimensionlessParams& d, double mass, double hbar, double omega0);

// Half-grid sample of an even potential: values[i] = Vbar(i * qmax / (n-1)),
// qbar >= 0 only; the full potential is the even extension Vbar(-q) = Vbar(q).
struct PotentialGrid {
  double qmax{kDefaultQmax};
  int n{kDefaultGridN};
  std::vector<double> values;

  double h() const { return qmax / (n - 1); }
  double q(int i) const { return h() * i; }
  bool all_finite() const;
  void validate() const;
};

// Vbar0(qbar) = -qbar^2/2 + lam qbar^4 sampled on [0, qmax].
PotentialGrid bare_potential(double lam, double qmax = kDefaultQmax, int n = kDefaultGridN);

// Ratio of well zero-point energy to barrier height, 8*sqrt(2)*lam.
// Tunneling through a deep barrier corresponds to r << 1.
double r_ratio(double lam);

}  // namespace nprg
