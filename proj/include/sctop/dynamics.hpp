#pragma once

// Base circle maps T, convolution kernels g, and the density-dependent
// coupled map T_{eps,f} = I_f o T with I_f(x) = x + eps (g * f)(x).
//
// Two forms of the coupled map are available:
//   Composed:  T_{eps,f} = T + eps (g * f) o T, the composition above.
//   Convolved: T_{eps,f} = T + eps (g o T) * f, the shortcut formula some
//              numerical treatments use instead. It differs from the
//              composition unless T is a rotation.
//
// Map values are kept as unreduced lifts (T(x) may exceed 1). Every consumer
// feeds them through e_k, which is 1-periodic, so reduction is never needed.

#include <functional>
#include <string>
#include <vector>

#include "sctop/fourier.hpp"

namespace sctop {

enum class MapFamily { PinchedDoubling, Doubling, Rotation, Custom };

class CircleMap {
 public:
  using Fn = std::function<double(double)>;

  /// T(x) = 2x - (a / 2 pi) sin(2 pi x). Requires |a| < 1 so that min T' = 2 - |a| > 1.
  static CircleMap pinched_doubling(double a);
  static CircleMap doubling();
  /// x + alpha. Not expanding; used for operator checks only.
  static CircleMap rotation(double alpha);
  /// Arbitrary lift with its derivative.
  static CircleMap custom(std::string name, Fn lift, Fn derivative);

  MapFamily family() const noexcept { return family_; }
  const std::string& name() const noexcept { return name_; }
  double parameter() const noexcept { return parameter_; }

  double operator()(double x) const { return lift_(x); }
  double derivative(double x) const { return derivative_(x); }

  /// Lift sampled at x_j = j / points.
  std::vector<double> sample(std::size_t points) const;

  /// sup 1/|T'| estimated on a grid of the given size.
  double contraction_bound(std::size_t points = 4096) const;

 private:
  CircleMap(MapFamily family, std::string name, double parameter, Fn lift, Fn derivative);

  MapFamily family_;
  std::string name_;
  double parameter_;
  Fn lift_;
  Fn derivative_;
};

enum class KernelKind { Bump, BumpDerivative, Custom };

enum class CouplingForm { Composed, Convolved };

const char* to_string(CouplingForm form);

/// e * exp(1 / (u^2 - 1)), u = (x - 1/2) / delta, for |x - 1/2| <= delta; 0 otherwise.
/// Closed forms of the first and second derivatives; x is reduced mod 1.
double bump(double x, double delta);
double bump_derivative(double x, double delta);
double bump_second_derivative(double x, double delta);

/// Convolution kernel g(x - y) with Fourier coefficients on -N+1..N.
struct KernelSpec {
  KernelKind kind = KernelKind::Bump;
  double delta = 0.45;
  double scale = 1.0;
  double epsilon = 0.0;
  CouplingForm form = CouplingForm::Composed;
  FourierDensity coefficients{1};
  double sup_norm = 0.0;   // ||g||_inf on the grid
  double c1_norm = 0.0;    // ||g||_inf + ||g'||_inf on the grid
  std::function<double(double)> value;
  std::function<double(double)> slope;

  std::size_t order() const noexcept { return coefficients.order(); }
  Complex hat(Frequency k) const { return coefficients[k]; }
  double operator()(double x) const { return value(x); }

  /// eps * ||g||_{C^1}; the coupling is guaranteed invertible while this is < 1.
  double stability_margin() const noexcept { return epsilon * c1_norm; }
  bool is_stable() const noexcept { return stability_margin() < 1.0; }

  /// Copy with a different coupling strength (eps >= 0).
  KernelSpec with_epsilon(double eps) const;
};

/// g = scale * b (derivative = false) or g = -scale * b' (derivative = true).
/// Throws InvalidArgument unless 0 < delta <= 0.5.
KernelSpec make_bump_kernel(double delta, double scale, bool derivative, std::size_t order,
                            double epsilon = 0.0);

/// Kernel from closures for g and g'.
KernelSpec make_custom_kernel(std::function<double(double)> value,
                              std::function<double(double)> slope, std::size_t order,
                              double epsilon = 0.0);

/// Fourier coefficients of g o T on -N+1..N, from samples on the oversampled grid.
FourierDensity composed_kernel(const CircleMap& map, const KernelSpec& kernel,
                               std::size_t oversampling = kDefaultOversampling);

/// T_{eps,f}, I_f, I_f', I_f'' on the 16N grid for a given density f.
///
/// For either form T_{eps,f}(x_j) = T(x_j) + eps sum_k c^(k) f^(k) e_k(p_j)
/// with (c, p) = (g^, T(x_j)) composed or ((g o T)^, x_j) convolved;
/// field_kernel and field_points hold c and p.
struct CoupledMapGrid {
  FourierDensity density{1};
  double epsilon = 0.0;
  CouplingForm form = CouplingForm::Composed;
  FourierDensity field_kernel{1};
  std::vector<double> field_points;
  std::vector<double> base;          // T(x_j)
  std::vector<double> coupled;       // T_{eps,f}(x_j)
  std::vector<double> coupling;      // I_f(x_j)
  std::vector<double> coupling_d1;   // I_f'(x_j)
  std::vector<double> coupling_d2;   // I_f''(x_j)

  std::size_t order() const noexcept { return density.order(); }
  std::size_t size() const noexcept { return base.size(); }
  double min_coupling_derivative() const;
};

/// Throws InvalidArgument if f is not flagged real, orders differ or
/// eps ||g||_{C^1} >= 1, and NonInvertibleCoupling if min I_f' <= 0.
CoupledMapGrid build_coupled_map(const CircleMap& map, const KernelSpec& kernel,
                                 const FourierDensity& f,
                                 std::size_t oversampling = kDefaultOversampling);

/// Real part of sum_k c^(k) e_k(y_j) at arbitrary points (nonuniform evaluation).
std::vector<double> evaluate_at(const FourierDensity& c, const std::vector<double>& points);

}  // namespace sctop
