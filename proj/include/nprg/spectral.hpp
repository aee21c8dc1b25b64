#pragma once
// Independent eta = 0 oracle: exact diagonalization of
//   H = -1/2 d^2/dq^2 + Vbar0(q) + J q
// on a hard-wall grid. Produces the low spectrum, the tunneling gap
// E1 - E0, and the exact localization susceptibility chi = -d^2 E0 / dJ^2.
// Shares no code with the flow solver.

#include <functional>
#include <stdexcept>
#include <vector>

namespace nprg {

struct SpectralSettings {
  double box_halfwidth{8.0};  // hard walls at +-L
  int basis_size{2048};       // interior grid points
  double tilt{1e-3};          // source step dJ for finite differencing
  int eigencount{4};          // lowest eigenvalues returned

  void validate() const;
};

struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending, [hbar w0]
  double gap{};                     // E1 - E0
  double chi{};                     // filled by oracle_summary, else NaN
  double wall_density{};            // ground-state |psi|^2 density at the walls
};

struct EigenSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BoxTooSmallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnstableDifferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Diagonalize with an arbitrary even-extended potential (used for analytic
// cross-checks); V is sampled over the full box [-L, L].
SpectralResult diagonalize_potential(const std::function<double(double)>& potential, double tilt_j,
                                     const SpectralSettings& settings);

// Double-well potential -q^2/2 + lam q^4 plus source J q.
SpectralResult diagonalize(double lam, double tilt_j, const SpectralSettings& settings);

// chi = -(E0(dJ) - 2 E0(0) + E0(-dJ)) / dJ^2, cross-checked against the
// dJ/2 estimate (Richardson guard); returns the dJ/2 value.
double exact_susceptibility_potential(const std::function<double(double)>& potential,
                                      const SpectralSettings& settings);
double exact_susceptibility(double lam, const SpectralSettings& settings);

// Spectrum at J = 0 with chi filled in.
SpectralResult oracle_summary(double lam, const SpectralSettings& settings);

}  // namespace nprg
