#pragma once

// Thin FFTW wrapper. Plans are created once per (size, direction) under a
// mutex and then executed through the new-array interface, which FFTW
// guarantees to be thread-safe.

#include <complex>
#include <cstddef>
#include <span>

namespace sctop::fft {

/// out_m = sum_j in_j exp(-2 pi i m j / n). No normalisation.
void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

/// out_j = sum_m in_m exp(+2 pi i m j / n). No normalisation.
void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

/// Index of logical frequency k in an n-point DFT array.
inline std::size_t wrap(long k, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((k % m) + m) % m);
}

}  // namespace sctop::fft
