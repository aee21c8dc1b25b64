#pragma once
// Grid kernels for the flow solver. Each kernel has a serial reference path
// and an OpenMP path; both compute every element with identical arithmetic,
// so results are bit-for-bit equal across backends and thread counts.

#include <span>

namespace nprg::kernels {

enum class Backend { serial, openmp };

bool openmp_enabled();
int max_threads();
Backend default_backend();

// 4th-order second derivative of an even half-grid function: ghost points
// v(-i) = v(i) across the origin, one-sided stencils at the outer edge.
// Exact for polynomials up to degree 5. Requires v.size() >= 6.
void curvature(std::span<const double> v, double h, std::span<double> out, Backend backend);

// dvdt[i] = (lambda / 2pi) * log(A_i) with A_i = 1 + etabar/lambda + curv[i]/lambda^2.
// Points with A_i <= 0 get dvdt = 0. Returns min_i A_i.
double flow_rate(std::span<const double> curv, double lambda, double etabar,
                 std::span<double> dvdt, Backend backend);

// out[i] = y[i] + a * k[i]
void axpy(std::span<const double> y, double a, std::span<const double> k,
          std::span<double> out, Backend backend);

// y[i] += (dt/6) * (k1[i] + 2 k2[i] + 2 k3[i] + k4[i])
void rk4_combine(std::span<double> y, double dt, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, Backend backend);

}  // namespace nprg::kernels
