#include "sctop/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sctop/errors.hpp"
#include "sctop/fft.hpp"
#include "sctop/fourier.hpp"

namespace sctop::kernels {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kGridBlock = 1024;

double frac(double x) {
  const double r = x - std::floor(x);
  return r < 1.0 ? r : 0.0;
}

/// exp(2 pi i k s), with the phase reduced before scaling by 2 pi.
Complex phase(long k, double s) {
  return std::polar(1.0, kTwoPi * frac(static_cast<double>(k) * frac(s)));
}

Eigen::Index at(long k, std::size_t order) {
  return static_cast<Eigen::Index>(k + static_cast<long>(order) - 1);
}

std::size_t check_grid(std::size_t samples, std::size_t order, const char* who) {
  if (order == 0) throw InvalidArgument(std::string(who) + ": order must be at least 1");
  if (samples == 0 || samples % order != 0 || samples / order < 2) {
    throw InvalidArgument(std::string(who) + ": " + std::to_string(samples) +
                          " samples is not a grid for order " + std::to_string(order));
  }
  return samples;
}

/// Writes row k and its mirror row -k from the spectrum of exp(-2 pi i k S_j).
void scatter_transfer_row(Eigen::MatrixXcd& out, long k, std::size_t order, double weight,
                          const std::vector<Complex>& spectrum) {
  const std::size_t m = spectrum.size();
  const double scale = weight / static_cast<double>(m);
  const long n = static_cast<long>(order);
  for (long i = -n + 1; i <= n; ++i) {
    out(at(k, order), at(i, order)) = scale * spectrum[fft::wrap(-i, m)];
    out(at(-k, order), at(i, order)) = scale * std::conj(spectrum[fft::wrap(i, m)]);
  }
}

/// Places the half matrix H (rows k = 1..N-1, columns i = -N..N) into the
/// 2N x 2N layout using Q[-k, -i] = conj(Q[k, i]).
Eigen::MatrixXcd mirror_half(const Eigen::MatrixXcd& half, std::size_t order) {
  const long n = static_cast<long>(order);
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (long k = 1; k <= n - 1; ++k) {
    for (long i = -n; i <= n; ++i) {
      const Complex v = half(k - 1, i + n);
      if (i >= -n + 1) q(at(k, order), at(i, order)) = v;
      if (-i >= -n + 1 && -i <= n) q(at(-k, order), at(-i, order)) = std::conj(v);
    }
  }
  return q;
}

void require_same_size(std::span<const double> a, std::span<const double> b,
                       std::span<const double> c) {
  if (a.size() != b.size() || a.size() != c.size()) {
    throw InvalidArgument("coupling_quadrature: coupled, base and density grids differ in size");
  }
}

}  // namespace

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) {
  if (n < 1) throw InvalidArgument("thread count must be at least 1");
  omp_set_num_threads(n);
}

// ===========================================================================
// Serial reference

namespace serial {

Eigen::MatrixXcd transfer_matrix(std::span<const double> map_samples, std::size_t order) {
  const std::size_t m = check_grid(map_samples.size(), order, "transfer_matrix");
  const FejerWeights w(order);
  const long n = static_cast<long>(order);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  out(at(0, order), at(0, order)) = 1.0;
  std::vector<Complex> samples(m), spectrum(m);
  for (long k = 1; k <= n - 1; ++k) {
    for (std::size_t j = 0; j < m; ++j) samples[j] = phase(-k, map_samples[j]);
    fft::forward(samples, spectrum);
    scatter_transfer_row(out, k, order, w(k), spectrum);
  }
  return out;
}

Eigen::MatrixXcd coupling_quadrature(std::span<const double> coupled, std::span<const double> base,
                                     std::span<const double> density, std::size_t order) {
  require_same_size(coupled, base, density);
  const std::size_t m = check_grid(coupled.size(), order, "coupling_quadrature");
  const long n = static_cast<long>(order);
  Eigen::MatrixXcd half = Eigen::MatrixXcd::Zero(std::max<long>(n - 1, 0), 2 * n + 1);
  for (long k = 1; k <= n - 1; ++k) {
    for (long i = -n; i <= n; ++i) {
      Complex sum{};
      for (std::size_t j = 0; j < m; ++j) {
        sum += phase(-k, coupled[j]) * phase(i, base[j]) * density[j];
      }
      half(k - 1, i + n) = sum / static_cast<double>(m);
    }
  }
  return mirror_half(half, order);
}

void characteristic_sums(std::span<const double> positions, std::span<Complex> out) {
  std::fill(out.begin(), out.end(), Complex{});
  if (positions.empty()) return;
  for (const double x : positions) {
    const Complex z = std::polar(1.0, -kTwoPi * frac(x));
    Complex p = 1.0;
    for (auto& c : out) {
      c += p;
      p *= z;
    }
  }
  for (auto& c : out) c /= static_cast<double>(positions.size());
}

void advance_particles(std::span<double> positions, const CircleMap& map,
                       std::span<const Complex> field, double epsilon, bool at_image) {
  for (double& x : positions) {
    const double y = map(x);
    double value = field.empty() ? 0.0 : field[0].real();
    if (field.size() > 1) {
      const Complex z = std::polar(1.0, kTwoPi * frac(at_image ? y : x));
      Complex p = 1.0, acc{};
      for (std::size_t k = 1; k < field.size(); ++k) {
        p *= z;
        acc += field[k] * p;
      }
      value += 2.0 * acc.real();
    }
    x = frac(y + epsilon * value);
  }
}

}  // namespace serial

// ===========================================================================
// OpenMP

namespace parallel {

Eigen::MatrixXcd transfer_matrix(std::span<const double> map_samples, std::size_t order) {
  const std::size_t m = check_grid(map_samples.size(), order, "transfer_matrix");
  const FejerWeights w(order);
  const long n = static_cast<long>(order);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  out(at(0, order), at(0, order)) = 1.0;
#pragma omp parallel
  {
    std::vector<Complex> samples(m), spectrum(m);
#pragma omp for schedule(static)
    for (long k = 1; k <= n - 1; ++k) {
      for (std::size_t j = 0; j < m; ++j) samples[j] = phase(-k, map_samples[j]);
      fft::forward(samples, spectrum);
      scatter_transfer_row(out, k, order, w(k), spectrum);
    }
  }
  return out;
}

Eigen::MatrixXcd coupling_quadrature(std::span<const double> coupled, std::span<const double> base,
                                     std::span<const double> density, std::size_t order) {
  require_same_size(coupled, base, density);
  const std::size_t m = check_grid(coupled.size(), order, "coupling_quadrature");
  const long n = static_cast<long>(order);
  const long rows = std::max<long>(n - 1, 0);
  const long cols = 2 * n + 1;
  Eigen::MatrixXcd half = Eigen::MatrixXcd::Zero(rows, cols);
  if (rows == 0) return mirror_half(half, order);

  Eigen::MatrixXcd left(rows, static_cast<Eigen::Index>(kGridBlock));
  Eigen::MatrixXcd right(static_cast<Eigen::Index>(kGridBlock), cols);
  for (std::size_t j0 = 0; j0 < m; j0 += kGridBlock) {
    const auto b = static_cast<long>(std::min(kGridBlock, m - j0));
#pragma omp parallel for schedule(static)
    for (long jj = 0; jj < b; ++jj) {
      const std::size_t j = j0 + static_cast<std::size_t>(jj);
      for (long k = 1; k <= n - 1; ++k) left(k - 1, jj) = phase(-k, coupled[j]);
      for (long i = -n; i <= n; ++i) right(jj, i + n) = phase(i, base[j]) * density[j];
    }
    // Eigen partitions the product over output tiles, so every entry is
    // accumulated by one thread in a fixed order.
    half.noalias() += left.leftCols(b) * right.topRows(b);
  }
  half /= static_cast<double>(m);
  return mirror_half(half, order);
}

void characteristic_sums(std::span<const double> positions, std::span<Complex> out) {
  std::fill(out.begin(), out.end(), Complex{});
  if (positions.empty() || out.empty()) return;
  const std::size_t count = out.size();
  const std::size_t blocks = (positions.size() + kParticleBlock - 1) / kParticleBlock;
  std::vector<Complex> partial(blocks * count, Complex{});
#pragma omp parallel
  {
    // Lane-major accumulators: entry k * kLanes + l belongs to lane l.
    std::vector<double> acc_re(count * kLanes), acc_im(count * kLanes);
#pragma omp for schedule(static)
    for (long b = 0; b < static_cast<long>(blocks); ++b) {
      std::fill(acc_re.begin(), acc_re.end(), 0.0);
      std::fill(acc_im.begin(), acc_im.end(), 0.0);
      const std::size_t lo = static_cast<std::size_t>(b) * kParticleBlock;
      const std::size_t hi = std::min(positions.size(), lo + kParticleBlock);
      for (std::size_t j = lo; j < hi; j += kLanes) {
        double zr[kLanes], zi[kLanes], pr[kLanes], pi[kLanes];
        for (std::size_t l = 0; l < kLanes; ++l) {
          // Padding lanes get z = 0, so only their k = 0 term (1) survives.
          const bool live = j + l < hi;
          const double angle = live ? -kTwoPi * frac(positions[j + l]) : 0.0;
          zr[l] = live ? std::cos(angle) : 0.0;
          zi[l] = live ? std::sin(angle) : 0.0;
          pr[l] = 1.0;
          pi[l] = 0.0;
        }
        for (std::size_t k = 0; k < count; ++k) {
          double* ar = acc_re.data() + k * kLanes;
          double* ai = acc_im.data() + k * kLanes;
          for (std::size_t l = 0; l < kLanes; ++l) {
            ar[l] += pr[l];
            ai[l] += pi[l];
            const double r = pr[l] * zr[l] - pi[l] * zi[l];
            pi[l] = pr[l] * zi[l] + pi[l] * zr[l];
            pr[l] = r;
          }
        }
      }
      Complex* dst = partial.data() + static_cast<std::size_t>(b) * count;
      for (std::size_t k = 0; k < count; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t l = 0; l < kLanes; ++l) {
          re += acc_re[k * kLanes + l];
          im += acc_im[k * kLanes + l];
        }
        dst[k] = Complex(re, im);
      }
      // Remove the padding lanes' k = 0 contributions.
      const std::size_t padded = (hi - lo + kLanes - 1) / kLanes * kLanes;
      dst[0] -= static_cast<double>(padded - (hi - lo));
    }
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t k = 0; k < count; ++k) out[k] += partial[b * count + k];
  }
  for (auto& c : out) c /= static_cast<double>(positions.size());
}

void advance_particles(std::span<double> positions, const CircleMap& map,
                       std::span<const Complex> field, double epsilon, bool at_image) {
  const double base_value = field.empty() ? 0.0 : field[0].real();
  const std::size_t count = field.size();
  std::vector<double> fr(count), fi(count);
  for (std::size_t k = 0; k < count; ++k) {
    fr[k] = field[k].real();
    fi[k] = field[k].imag();
  }
  const long groups = static_cast<long>((positions.size() + kLanes - 1) / kLanes);
#pragma omp parallel for schedule(static)
  for (long g = 0; g < groups; ++g) {
    const std::size_t lo = static_cast<std::size_t>(g) * kLanes;
    const std::size_t lanes = std::min(kLanes, positions.size() - lo);
    double y[kLanes], zr[kLanes], zi[kLanes], pr[kLanes], pi[kLanes], acc[kLanes];
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double x = l < lanes ? positions[lo + l] : 0.0;
      y[l] = l < lanes ? map(x) : 0.0;
      const double angle = kTwoPi * frac(at_image ? y[l] : x);
      zr[l] = std::cos(angle);
      zi[l] = std::sin(angle);
      pr[l] = 1.0;
      pi[l] = 0.0;
      acc[l] = 0.0;
    }
    for (std::size_t k = 1; k < count; ++k) {
      for (std::size_t l = 0; l < kLanes; ++l) {
        const double r = pr[l] * zr[l] - pi[l] * zi[l];
        pi[l] = pr[l] * zi[l] + pi[l] * zr[l];
        pr[l] = r;
        acc[l] += fr[k] * pr[l] - fi[k] * pi[l];
      }
    }
    for (std::size_t l = 0; l < lanes; ++l) {
      positions[lo + l] = frac(y[l] + epsilon * (base_value + 2.0 * acc[l]));
    }
  }
}

}  // namespace parallel

}  // namespace sctop::kernels
