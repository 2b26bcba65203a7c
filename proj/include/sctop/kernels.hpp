#pragma once

// Hot loops of the library, each in two flavours:
//
//   serial::   plain loops in a fixed order; kept as the reference the
//              parallel code is tested against.
//   parallel:: OpenMP (and Eigen GEMM) versions used by the library.
//
// Both flavours compute the same quantity. Parallel reductions use a fixed
// block partition so results do not depend on the thread count.
//
// Matrices are 2N x 2N in logical-frequency layout: row/column offset
// k + N - 1 holds frequency k in -N+1..N.

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "sctop/dynamics.hpp"

namespace sctop::kernels {

using Complex = std::complex<double>;

/// Block size for the particle reductions; fixed so sums are reproducible.
inline constexpr std::size_t kParticleBlock = 8192;
/// Particles processed side by side in the parallel particle loops.
inline constexpr std::size_t kLanes = 8;

namespace serial {

/// Fejer-weighted transfer matrix of the map sampled at x_j = j/M:
///   L[k, i] = w(k) (1/M) sum_j exp(-2 pi i k S_j) exp(2 pi i i x_j).
/// Row 0 is the exact unit row, row N is zero. Samples must be real.
Eigen::MatrixXcd transfer_matrix(std::span<const double> map_samples, std::size_t order);

/// Q[k, i] = (1/M) sum_j exp(-2 pi i k S_j) exp(2 pi i i T_j) f_j for 1 <= |k| <= N-1;
/// rows 0 and N are zero. S, T, f sampled on the same grid; f real.
Eigen::MatrixXcd coupling_quadrature(std::span<const double> coupled, std::span<const double> base,
                                     std::span<const double> density, std::size_t order);

/// out[k] = (1/M) sum_j exp(-2 pi i k x_j), k = 0..out.size()-1.
void characteristic_sums(std::span<const double> positions, std::span<Complex> out);

/// x <- frac(T(x) + eps * Re[a_0 + 2 sum_{k>=1} a_k exp(2 pi i k p)]) with
/// p = T(x), or p = x when at_image is false.
void advance_particles(std::span<double> positions, const CircleMap& map,
                       std::span<const Complex> field, double epsilon, bool at_image = true);

}  // namespace serial

namespace parallel {

Eigen::MatrixXcd transfer_matrix(std::span<const double> map_samples, std::size_t order);

Eigen::MatrixXcd coupling_quadrature(std::span<const double> coupled, std::span<const double> base,
                                     std::span<const double> density, std::size_t order);

void characteristic_sums(std::span<const double> positions, std::span<Complex> out);

void advance_particles(std::span<double> positions, const CircleMap& map,
                       std::span<const Complex> field, double epsilon, bool at_image = true);

}  // namespace parallel

/// Number of OpenMP threads the parallel kernels will use.
int thread_count();
/// Overrides the thread count (n >= 1).
void set_thread_count(int n);

}  // namespace sctop::kernels
