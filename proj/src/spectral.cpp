#include "nprg/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace nprg {

void SpectralSettings::validate() const {
  if (!(box_halfwidth > 0.0))
    throw std::invalid_argument("invalid parameter: box_halfwidth must be > 0");
  if (basis_size < 256)
    throw std::invalid_argument("invalid parameter: basis_size must be >= 256");
  if (!(tilt > 0.0)) throw std::invalid_argument("invalid parameter: tilt must be > 0");
  if (eigencount < 2 || eigencount > 64)
    throw std::invalid_argument("invalid parameter: eigencount must be in [2, 64]");
}

namespace {

// 4th-order 5-point kinetic stencil, hard walls (zero ghosts).
struct Kinetic {
  double diag, off1, off2;
  explicit Kinetic(double dx) {
    const double inv = 1.0 / (24.0 * dx * dx);
    diag = 30.0 * inv;
    off1 = -16.0 * inv;
    off2 = inv;
  }
};

// Selected eigenvalues of the banded Hamiltonian by bisection (no vectors).
std::vector<double> eigenvalues_lowest(const std::vector<double>& diag, const Kinetic& kin,
                                       int k) {
  const int n = static_cast<int>(diag.size());
  constexpr int kd = 2;
  const int ldab = kd + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    ab[kd + static_cast<std::size_t>(j) * ldab] = kin.diag + diag[j];
    if (j >= 1) ab[kd - 1 + static_cast<std::size_t>(j) * ldab] = kin.off1;
    if (j >= 2) ab[kd - 2 + static_cast<std::size_t>(j) * ldab] = kin.off2;
  }
  std::vector<double> w(n), z(1);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kd, ab.data(), ldab, nullptr, n, 0.0, 0.0, 1, k,
      2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), n, ifail.data());
  if (info != 0 || found < k)
    throw EigenSolveError("eigensolver failed to converge (info=" + std::to_string(info) + ")");
  w.resize(k);
  return w;
}

// Inverse iteration on (H - sigma I) with a general-band LU; few iterations
// suffice since sigma sits a hair below an isolated eigenvalue.
std::vector<double> inverse_iteration(const std::vector<double>& diag, const Kinetic& kin,
                                      double sigma) {
  const int n = static_cast<int>(diag.size());
  constexpr int kl = 2, ku = 2;
  const int ldab = 2 * kl + ku + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  auto at = [&](int i, int j) -> double& {
    return ab[kl + ku + i - j + static_cast<std::size_t>(j) * ldab];
  };
  for (int j = 0; j < n; ++j) {
    at(j, j) = kin.diag + diag[j] - sigma;
    if (j >= 1) { at(j - 1, j) = kin.off1; at(j, j - 1) = kin.off1; }
    if (j >= 2) { at(j - 2, j) = kin.off2; at(j, j - 2) = kin.off2; }
  }
  std::vector<lapack_int> ipiv(n);
  lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
  if (info < 0) throw EigenSolveError("band factorization failed (info=" + std::to_string(info) + ")");

  // Deterministic start vector with overlap on both parity sectors.
  std::vector<double> x(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (int i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    x[i] = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
  }
  for (int it = 0; it < 3; ++it) {
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab.data(), ldab, ipiv.data(),
                          x.data(), n);
    if (info != 0) throw EigenSolveError("band solve failed (info=" + std::to_string(info) + ")");
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  return x;
}

// Rayleigh quotient in long double with compensated sums; quadratically
// insensitive to the eigenvector's rounding error, so the refined eigenvalue
// is far more accurate than the bisection value it starts from.
long double rayleigh_quotient(const std::vector<double>& psi, const std::vector<double>& diag,
                              const Kinetic& kin) {
  const int n = static_cast<int>(psi.size());
  long double num = 0.0L, cnum = 0.0L, den = 0.0L, cden = 0.0L;
  auto add = [](long double& sum, long double& comp, long double term) {
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  for (int i = 0; i < n; ++i) {
    const long double p = psi[i];
    long double hp = (static_cast<long double>(kin.diag) + diag[i]) * p;
    if (i >= 1) hp += static_cast<long double>(kin.off1) * psi[i - 1];
    if (i + 1 < n) hp += static_cast<long double>(kin.off1) * psi[i + 1];
    if (i >= 2) hp += static_cast<long double>(kin.off2) * psi[i - 2];
    if (i + 2 < n) hp += static_cast<long double>(kin.off2) * psi[i + 2];
    add(num, cnum, p * hp);
    add(den, cden, p * p);
  }
  return num / den;
}

struct Eigenpair {
  long double value;
  std::vector<double> vector;
};

Eigenpair refined_eigenpair(const std::vector<double>& diag, const Kinetic& kin,
                            double bisect_value) {
  const double scale = std::max(1.0, std::abs(bisect_value));
  const double sigma = bisect_value - 1e-6 * scale;
  Eigenpair ep;
  ep.vector = inverse_iteration(diag, kin, sigma);
  ep.value = rayleigh_quotient(ep.vector, diag, kin);
  return ep;
}

struct Problem {
  std::vector<double> diag;  // V(x_i) + J x_i
  double dx;
};

Problem build_problem(const std::function<double(double)>& potential, double tilt_j,
                      const SpectralSettings& s) {
  const int n = s.basis_size;
  const double dx = 2.0 * s.box_halfwidth / (n + 1);
  Problem p{std::vector<double>(n), dx};
  for (int i = 0; i < n; ++i) {
    const double x = -s.box_halfwidth + (i + 1) * dx;
    p.diag[i] = potential(x) + tilt_j * x;
  }
  return p;
}

long double ground_energy(const std::function<double(double)>& potential, double tilt_j,
                          const SpectralSettings& s) {
  const Problem p = build_problem(potential, tilt_j, s);
  const Kinetic kin(p.dx);
  const std::vector<double> w = eigenvalues_lowest(p.diag, kin, 1);
  return refined_eigenpair(p.diag, kin, w[0]).value;
}

}  // namespace

SpectralResult diagonalize_potential(const std::function<double(double)>& potential, double tilt_j,
                                     const SpectralSettings& settings) {
  settings.validate();
  const Problem p = build_problem(potential, tilt_j, settings);
  const Kinetic kin(p.dx);
  const std::vector<double> w = eigenvalues_lowest(p.diag, kin, settings.eigencount);

  SpectralResult res;
  res.eigenvalues.resize(w.size());
  std::vector<double> psi0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    Eigenpair ep = refined_eigenpair(p.diag, kin, w[j]);
    res.eigenvalues[j] = static_cast<double>(ep.value);
    if (j == 0) psi0 = std::move(ep.vector);
  }
  res.gap = res.eigenvalues[1] - res.eigenvalues[0];
  res.chi = std::numeric_limits<double>::quiet_NaN();
  res.wall_density =
      std::max(psi0.front() * psi0.front(), psi0.back() * psi0.back()) / p.dx;
  if (res.wall_density > 1e-10)
    throw BoxTooSmallError("ground-state density at the wall is " +
                           std::to_string(res.wall_density) + "; enlarge box_halfwidth");
  return res;
}

SpectralResult diagonalize(double lam, double tilt_j, const SpectralSettings& settings) {
  if (!(lam > 0.0)) throw std::invalid_argument("invalid parameter: lam must be > 0");
  const double q_min = 0.5 / std::sqrt(lam);
  if (settings.box_halfwidth <= 2.0 * q_min)
    throw std::invalid_argument(
        "invalid parameter: box_halfwidth must exceed twice the well position");
  return diagonalize_potential(
      [lam](double q) { return q * q * (-0.5 + lam * q * q); }, tilt_j, settings);
}

double exact_susceptibility_potential(const std::function<double(double)>& potential,
                                      const SpectralSettings& settings) {
  settings.validate();
  const long double e0 = ground_energy(potential, 0.0, settings);
  auto chi_at = [&](double d) {
    const long double ep = ground_energy(potential, +d, settings);
    const long double em = ground_energy(potential, -d, settings);
    return -(ep - 2.0L * e0 + em) / (static_cast<long double>(d) * d);
  };
  const long double chi_full = chi_at(settings.tilt);
  const long double chi_half = chi_at(0.5 * settings.tilt);
  const double rel = static_cast<double>(std::abs(chi_half - chi_full) /
                                         std::max(std::abs(chi_half), 1e-300L));
  if (rel > 1e-4)
    throw UnstableDifferenceError("susceptibility estimates at dJ and dJ/2 differ by " +
                                  std::to_string(rel) + " relative");
  return static_cast<double>(chi_half);
}

double exact_susceptibility(double lam, const SpectralSettings& settings) {
  if (!(lam > 0.0)) throw std::invalid_argument("invalid parameter: lam must be > 0");
  return exact_susceptibility_potential(
      [lam](double q) { return q * q * (-0.5 + lam * q * q); }, settings);
}

SpectralResult oracle_summary(double lam, const SpectralSettings& settings) {
  SpectralResult res = diagonalize(lam, 0.0, settings);
  res.chi = exact_susceptibility(lam, settings);
  return res;
}

}  // namespace nprg
