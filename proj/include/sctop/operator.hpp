#pragma once

// Frequency-space matrices of Pi_N o L_S, where L_S is the transfer
// operator of a circle map S and Pi_N the Fejer projection.
//
// Entry (k, i) = w(k) * <e_{-k} o S>^(-i), computed with one FFT of
// exp(-2 pi i k S(x_j)) on the 16N grid per row. Real maps give
// L[-k, -i] = conj(L[k, i]), so only rows k = 1..N-1 are transformed.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "sctop/fourier.hpp"

namespace sctop {

struct OperatorMatrix {
  std::size_t order = 0;
  Eigen::MatrixXcd entries;
  std::string provenance;

  Complex operator()(Frequency k, Frequency i) const {
    return entries(index(k), index(i));
  }
  Eigen::Index index(Frequency k) const {
    return static_cast<Eigen::Index>(k + static_cast<Frequency>(order) - 1);
  }
};

/// Pi_N L_S from lift samples S(x_j) on the uniform grid (size oversampling * N).
OperatorMatrix assemble_transfer(std::span<const double> map_samples, std::size_t order,
                                 std::string provenance = {});

/// Matrix-vector product in logical frequencies. Preserves h^(0) exactly.
FourierDensity apply_operator(const OperatorMatrix& op, const FourierDensity& h);

struct FixedDensityOptions {
  double tolerance = 1e-13;
  std::size_t max_iterations = 10000;
  /// After convergence, one direct solve of (I - L) h = 0 on the nonzero
  /// frequencies removes the remaining tolerance-level error.
  bool polish = true;
};

/// Power iteration h <- L h from e_0; the unit k = 0 row keeps h^(0) = 1.
/// Throws ConvergenceError carrying the last coefficient max-norm residual.
FourierDensity leading_fixed_density(const OperatorMatrix& op, FixedDensityOptions options = {});

/// Debug dump: 16-byte header ("SCTOPMAT" then N as little-endian uint64)
/// followed by the 2N x 2N entries row-major as (re, im) little-endian doubles.
void write_operator(const OperatorMatrix& op, const std::filesystem::path& path);
OperatorMatrix read_operator(const std::filesystem::path& path);

}  // namespace sctop
