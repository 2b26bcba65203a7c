#include "sctop/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sctop/errors.hpp"
#include "sctop/fft.hpp"

namespace sctop {

namespace {

void require_order(std::size_t order) {
  if (order == 0) throw InvalidArgument("Fourier order must be at least 1");
}

void require_same_order(const FourierDensity& a, const FourierDensity& b, const char* what) {
  if (a.order() != b.order()) {
    throw InvalidArgument(std::string(what) + ": order mismatch (" + std::to_string(a.order()) +
                          " vs " + std::to_string(b.order()) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FourierDensity

FourierDensity::FourierDensity(std::size_t order, bool real)
    : order_(order), coeffs_(), real_(real) {
  require_order(order);
  coeffs_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * order));
}

FourierDensity::FourierDensity(std::size_t order, Eigen::VectorXcd coeffs, bool real)
    : order_(order), coeffs_(std::move(coeffs)), real_(real) {
  require_order(order);
  if (static_cast<std::size_t>(coeffs_.size()) != 2 * order) {
    throw InvalidArgument("FourierDensity: expected " + std::to_string(2 * order) +
                          " coefficients, got " + std::to_string(coeffs_.size()));
  }
}

FourierDensity FourierDensity::uniform(std::size_t order) {
  FourierDensity h(order, true);
  h[0] = 1.0;
  return h;
}

FourierDensity FourierDensity::mode(std::size_t order, Frequency k) {
  FourierDensity h(order, k == 0);
  h[k] = 1.0;
  return h;
}

std::size_t FourierDensity::offset_of(Frequency k) const {
  if (!contains(k)) {
    throw InvalidArgument("frequency " + std::to_string(k) + " outside [" +
                          std::to_string(min_frequency()) + ", " + std::to_string(max_frequency()) +
                          "]");
  }
  return static_cast<std::size_t>(k - min_frequency());
}

void FourierDensity::symmetrize() {
  const auto n = static_cast<Frequency>(order_);
  for (Frequency k = 1; k < n; ++k) {
    const Complex avg = 0.5 * ((*this)[k] + std::conj((*this)[-k]));
    (*this)[k] = avg;
    (*this)[-k] = std::conj(avg);
  }
  (*this)[0] = Complex((*this)[0].real(), 0.0);
}

double FourierDensity::hermitian_defect() const {
  double worst = std::abs((*this)[0].imag());
  for (Frequency k = 1; k < static_cast<Frequency>(order_); ++k) {
    worst = std::max(worst, std::abs((*this)[k] - std::conj((*this)[-k])));
  }
  return worst;
}

FourierDensity FourierDensity::resized(std::size_t new_order) const {
  FourierDensity out(new_order, real_);
  for (Frequency k = out.min_frequency(); k <= out.max_frequency(); ++k) {
    if (contains(k)) out[k] = (*this)[k];
  }
  return out;
}

Complex FourierDensity::evaluate(double x) const {
  const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * x);
  const Complex zinv = std::conj(z);
  Complex sum = (*this)[0];
  Complex up = 1.0, down = 1.0;
  for (Frequency k = 1; k <= max_frequency(); ++k) {
    up *= z;
    sum += (*this)[k] * up;
    if (-k >= min_frequency()) {
      down *= zinv;
      sum += (*this)[-k] * down;
    }
  }
  return sum;
}

FourierDensity& FourierDensity::operator+=(const FourierDensity& other) {
  require_same_order(*this, other, "operator+=");
  coeffs_ += other.coeffs_;
  real_ = real_ && other.real_;
  return *this;
}

FourierDensity& FourierDensity::operator-=(const FourierDensity& other) {
  require_same_order(*this, other, "operator-=");
  coeffs_ -= other.coeffs_;
  real_ = real_ && other.real_;
  return *this;
}

FourierDensity& FourierDensity::operator*=(Complex scale) {
  coeffs_ *= scale;
  real_ = real_ && scale.imag() == 0.0;
  return *this;
}

FourierDensity operator+(FourierDensity a, const FourierDensity& b) { return a += b; }
FourierDensity operator-(FourierDensity a, const FourierDensity& b) { return a -= b; }
FourierDensity operator*(Complex scale, FourierDensity a) { return a *= scale; }

// ---------------------------------------------------------------------------
// Fejer weights

FejerWeights::FejerWeights(std::size_t order) : order_(order) {
  require_order(order);
  const double n = static_cast<double>(order);
  weights_.resize(2 * order);
  for (std::size_t idx = 0; idx < weights_.size(); ++idx) {
    const auto k = static_cast<double>(static_cast<Frequency>(idx) - static_cast<Frequency>(order) + 1);
    weights_[idx] = std::max(0.0, 1.0 - std::abs(k) / n);
  }
}

double FejerWeights::operator()(Frequency k) const {
  const auto n = static_cast<Frequency>(order_);
  if (k < -n + 1 || k > n) throw InvalidArgument("Fejer weight requested outside -N+1..N");
  return weights_[static_cast<std::size_t>(k + n - 1)];
}

FejerWeights fejer_weights(std::size_t order) { return FejerWeights(order); }

FourierDensity project_fejer(const FourierDensity& h) {
  const FejerWeights w(h.order());
  FourierDensity out = h;
  for (std::size_t idx = 0; idx < h.size(); ++idx) {
    out.coeffs()[static_cast<Eigen::Index>(idx)] *= w.values()[idx];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid transforms

GridFunction to_grid(const FourierDensity& h, std::size_t oversampling) {
  if (oversampling < 2) throw InvalidArgument("to_grid: oversampling must be at least 2");
  const std::size_t m = oversampling * h.order();
  std::vector<Complex> spectrum(m, Complex{});
  for (Frequency k = h.min_frequency(); k <= h.max_frequency(); ++k) {
    spectrum[fft::wrap(k, m)] = h[k];
  }
  GridFunction out{h.order(), oversampling, Eigen::VectorXcd(static_cast<Eigen::Index>(m))};
  fft::backward(spectrum, std::span<Complex>(out.values.data(), m));
  return out;
}

FourierDensity from_grid(std::span<const Complex> values, std::size_t order, bool real) {
  require_order(order);
  const std::size_t m = values.size();
  if (m % order != 0 || m / order < 2) {
    throw InvalidArgument("from_grid: grid of size " + std::to_string(m) +
                          " is not a multiple >= 2 of order " + std::to_string(order));
  }
  std::vector<Complex> spectrum(m);
  fft::forward(values, spectrum);
  FourierDensity h(order, real);
  const double scale = 1.0 / static_cast<double>(m);
  for (Frequency k = h.min_frequency(); k <= h.max_frequency(); ++k) {
    h[k] = spectrum[fft::wrap(k, m)] * scale;
  }
  if (real) h.symmetrize();
  return h;
}

FourierDensity from_grid(const GridFunction& v, std::size_t order, bool real) {
  if (v.size() != v.oversampling * order) {
    throw InvalidArgument("from_grid: grid size " + std::to_string(v.size()) + " does not equal " +
                          std::to_string(v.oversampling) + " * " + std::to_string(order));
  }
  return from_grid(std::span<const Complex>(v.values.data(), v.size()), order, real);
}

// ---------------------------------------------------------------------------
// Diagonal operations and norms

FourierDensity differentiate(const FourierDensity& h) {
  FourierDensity out = h;
  const double two_pi = 2.0 * std::numbers::pi;
  for (Frequency k = h.min_frequency(); k <= h.max_frequency(); ++k) {
    out[k] *= Complex(0.0, two_pi * static_cast<double>(k));
  }
  return out;
}

FourierDensity convolve(const FourierDensity& f, const FourierDensity& g) {
  require_same_order(f, g, "convolve");
  FourierDensity out(f.order(), f.is_real() && g.is_real());
  out.coeffs() = f.coeffs().cwiseProduct(g.coeffs());
  return out;
}

double l1_norm(const FourierDensity& h, std::size_t oversampling) {
  const GridFunction grid = to_grid(h, oversampling);
  return grid.values.cwiseAbs().sum() / static_cast<double>(grid.size());
}

double w11_norm(const FourierDensity& h, std::size_t oversampling) {
  return l1_norm(h, oversampling) + l1_norm(differentiate(h), oversampling);
}

double l1_distance(const FourierDensity& a, const FourierDensity& b, std::size_t oversampling) {
  const std::size_t order = std::max(a.order(), b.order());
  return l1_norm(a.resized(order) - b.resized(order), oversampling);
}

double max_coefficient_distance(const FourierDensity& a, const FourierDensity& b) {
  require_same_order(a, b, "max_coefficient_distance");
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
}

std::vector<double> sample_uniform(const FourierDensity& h, std::size_t points) {
  if (points == 0) throw InvalidArgument("sample_uniform: need at least one point");
  std::vector<double> out(points);
  if (points >= h.size()) {
    // Every retained frequency has a distinct residue mod `points`.
    std::vector<Complex> spectrum(points, Complex{}), values(points);
    for (Frequency k = h.min_frequency(); k <= h.max_frequency(); ++k) {
      spectrum[fft::wrap(k, points)] += h[k];
    }
    fft::backward(spectrum, values);
    for (std::size_t j = 0; j < points; ++j) out[j] = values[j].real();
    return out;
  }
  for (std::size_t j = 0; j < points; ++j) {
    out[j] = h.evaluate(static_cast<double>(j) / static_cast<double>(points)).real();
  }
  return out;
}

}  // namespace sctop
