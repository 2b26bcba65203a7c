#pragma once

// Trigonometric polynomials on the unit circle S^1 = [0,1).
//
// A FourierDensity of order N stores the 2N coefficients h^(k) for the
// logical frequencies k = -N+1, ..., N in ascending order, so that
//
//     h(x) = sum_k h^(k) exp(2 pi i k x).
//
// Every module addresses coefficients by logical frequency through
// operator[] / offset_of(); raw offsets never leak out of this header.
//
// Physical-space work happens on a uniform grid x_j = j/M with M = 16N
// by default (the oversampling factor is a GridFunction parameter).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sctop {

using Complex = std::complex<double>;
using Frequency = long;

inline constexpr std::size_t kDefaultOversampling = 16;

class FourierDensity {
 public:
  /// Zero polynomial of the given order. Throws InvalidArgument for order 0.
  explicit FourierDensity(std::size_t order, bool real = true);
  FourierDensity(std::size_t order, Eigen::VectorXcd coeffs, bool real = true);

  /// The constant function 1 (e_0).
  static FourierDensity uniform(std::size_t order);
  /// The single mode e_k. Not flagged real unless k == 0.
  static FourierDensity mode(std::size_t order, Frequency k);

  std::size_t order() const noexcept { return order_; }
  std::size_t size() const noexcept { return 2 * order_; }
  Frequency min_frequency() const noexcept { return -static_cast<Frequency>(order_) + 1; }
  Frequency max_frequency() const noexcept { return static_cast<Frequency>(order_); }
  bool contains(Frequency k) const noexcept { return k >= min_frequency() && k <= max_frequency(); }
  std::size_t offset_of(Frequency k) const;

  Complex& operator[](Frequency k) { return coeffs_[static_cast<Eigen::Index>(offset_of(k))]; }
  const Complex& operator[](Frequency k) const {
    return coeffs_[static_cast<Eigen::Index>(offset_of(k))];
  }

  Eigen::VectorXcd& coeffs() noexcept { return coeffs_; }
  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }

  bool is_real() const noexcept { return real_; }
  void set_real(bool real) noexcept { real_ = real; }

  /// Average h^(k) with conj(h^(-k)) for |k| <= N-1; makes h^(0) real.
  /// The unpaired k = N slot is left untouched.
  void symmetrize();

  /// Largest |h^(k) - conj(h^(-k))| over |k| <= N-1.
  double hermitian_defect() const;

  /// Zero-pads (larger order) or drops frequencies (smaller order).
  FourierDensity resized(std::size_t new_order) const;

  /// Pointwise value at an arbitrary x (direct sum, O(N)).
  Complex evaluate(double x) const;

  FourierDensity& operator+=(const FourierDensity& other);
  FourierDensity& operator-=(const FourierDensity& other);
  FourierDensity& operator*=(Complex scale);

 private:
  std::size_t order_;
  Eigen::VectorXcd coeffs_;
  bool real_;
};

FourierDensity operator+(FourierDensity a, const FourierDensity& b);
FourierDensity operator-(FourierDensity a, const FourierDensity& b);
FourierDensity operator*(Complex scale, FourierDensity a);

/// Samples on the uniform grid x_j = j / size().
struct GridFunction {
  std::size_t order = 0;
  std::size_t oversampling = kDefaultOversampling;
  Eigen::VectorXcd values;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
  double point(std::size_t j) const noexcept {
    return static_cast<double>(j) / static_cast<double>(size());
  }
};

/// Triangular weights w(k) = max(0, 1 - |k|/N) over k = -N+1..N.
class FejerWeights {
 public:
  explicit FejerWeights(std::size_t order);

  std::size_t order() const noexcept { return order_; }
  double operator()(Frequency k) const;
  const std::vector<double>& values() const noexcept { return weights_; }

 private:
  std::size_t order_;
  std::vector<double> weights_;
};

FejerWeights fejer_weights(std::size_t order);

/// Coefficient-wise product with the Fejer weights; h^(N) becomes 0.
FourierDensity project_fejer(const FourierDensity& h);

GridFunction to_grid(const FourierDensity& h, std::size_t oversampling = kDefaultOversampling);

/// Truncating transform: keeps frequencies -N+1..N of the grid spectrum.
/// Throws InvalidArgument unless v.size() == oversampling * order.
FourierDensity from_grid(const GridFunction& v, std::size_t order, bool real = true);
FourierDensity from_grid(std::span<const Complex> values, std::size_t order, bool real = true);

/// (2 pi i k) h^(k).
FourierDensity differentiate(const FourierDensity& h);

/// Coefficient product f^(k) g^(k), i.e. the circular convolution f * g.
FourierDensity convolve(const FourierDensity& f, const FourierDensity& g);

/// Rectangle-rule L1 norm of |h| on the 16N grid.
double l1_norm(const FourierDensity& h, std::size_t oversampling = kDefaultOversampling);

/// l1_norm(h) + l1_norm(h').
double w11_norm(const FourierDensity& h, std::size_t oversampling = kDefaultOversampling);

/// L1 distance of two densities of possibly different order, measured at the
/// larger order.
double l1_distance(const FourierDensity& a, const FourierDensity& b,
                   std::size_t oversampling = kDefaultOversampling);

/// Largest |a^(k) - b^(k)|; orders must match.
double max_coefficient_distance(const FourierDensity& a, const FourierDensity& b);

/// Real parts of h at x_j = j / points, j = 0..points-1.
std::vector<double> sample_uniform(const FourierDensity& h, std::size_t points);

}  // namespace sctop
