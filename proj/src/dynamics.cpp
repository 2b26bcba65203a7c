#include "sctop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "sctop/errors.hpp"

namespace sctop {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_unit(double x) { return x - std::floor(x); }

std::vector<double> real_parts(const GridFunction& g) {
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = g.values[static_cast<Eigen::Index>(j)].real();
  return out;
}

KernelSpec finish_kernel(KernelSpec spec, std::size_t order) {
  const std::size_t m = kDefaultOversampling * order;
  std::vector<Complex> samples(m);
  double sup = 0.0, sup_slope = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(m);
    const double v = spec.value(x);
    samples[j] = v;
    sup = std::max(sup, std::abs(v));
    sup_slope = std::max(sup_slope, std::abs(spec.slope(x)));
  }
  spec.coefficients = from_grid(samples, order, true);
  spec.sup_norm = sup;
  spec.c1_norm = sup + sup_slope;
  return spec;
}

}  // namespace

// ---------------------------------------------------------------------------
// CircleMap

CircleMap::CircleMap(MapFamily family, std::string name, double parameter, Fn lift, Fn derivative)
    : family_(family),
      name_(std::move(name)),
      parameter_(parameter),
      lift_(std::move(lift)),
      derivative_(std::move(derivative)) {}

CircleMap CircleMap::pinched_doubling(double a) {
  if (!(std::abs(a) < 1.0)) {
    throw InvalidArgument("pinched doubling map needs |a| < 1 to stay expanding (got a = " +
                          std::to_string(a) + ")");
  }
  return CircleMap(
      MapFamily::PinchedDoubling, "pinched-doubling", a,
      [a](double x) { return 2.0 * x - a / kTwoPi * std::sin(kTwoPi * x); },
      [a](double x) { return 2.0 - a * std::cos(kTwoPi * x); });
}

CircleMap CircleMap::doubling() {
  return CircleMap(
      MapFamily::Doubling, "doubling", 0.0, [](double x) { return 2.0 * x; },
      [](double) { return 2.0; });
}

CircleMap CircleMap::rotation(double alpha) {
  return CircleMap(
      MapFamily::Rotation, "rotation", alpha, [alpha](double x) { return x + alpha; },
      [](double) { return 1.0; });
}

CircleMap CircleMap::custom(std::string name, Fn lift, Fn derivative) {
  if (!lift || !derivative) throw InvalidArgument("custom map needs both lift and derivative");
  return CircleMap(MapFamily::Custom, std::move(name), 0.0, std::move(lift), std::move(derivative));
}

std::vector<double> CircleMap::sample(std::size_t points) const {
  std::vector<double> out(points);
  for (std::size_t j = 0; j < points; ++j) {
    out[j] = lift_(static_cast<double>(j) / static_cast<double>(points));
  }
  return out;
}

double CircleMap::contraction_bound(std::size_t points) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double d = std::abs(derivative_(static_cast<double>(j) / static_cast<double>(points)));
    worst = std::max(worst, d > 0.0 ? 1.0 / d : INFINITY);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Bump kernels

double bump(double x, double delta) {
  const double u = (reduce_unit(x) - 0.5) / delta;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 + 1.0 / (u * u - 1.0));
}

double bump_derivative(double x, double delta) {
  const double u = (reduce_unit(x) - 0.5) / delta;
  if (std::abs(u) >= 1.0) return 0.0;
  const double q = u * u - 1.0;
  // d/du [1/(u^2-1)] = -2u / (u^2-1)^2
  return bump(x, delta) * (-2.0 * u / (q * q)) / delta;
}

double bump_second_derivative(double x, double delta) {
  const double u = (reduce_unit(x) - 0.5) / delta;
  if (std::abs(u) >= 1.0) return 0.0;
  const double q = u * u - 1.0;
  const double d1 = -2.0 * u / (q * q);
  const double d2 = (6.0 * u * u + 2.0) / (q * q * q);
  return bump(x, delta) * (d1 * d1 + d2) / (delta * delta);
}

KernelSpec KernelSpec::with_epsilon(double eps) const {
  if (!(eps >= 0.0)) throw InvalidArgument("coupling strength must be nonnegative");
  KernelSpec copy = *this;
  copy.epsilon = eps;
  return copy;
}

KernelSpec make_bump_kernel(double delta, double scale, bool derivative, std::size_t order,
                            double epsilon) {
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw InvalidArgument("bump width delta must lie in (0, 0.5], got " + std::to_string(delta));
  }
  if (!(epsilon >= 0.0)) throw InvalidArgument("coupling strength must be nonnegative");
  KernelSpec spec;
  spec.kind = derivative ? KernelKind::BumpDerivative : KernelKind::Bump;
  spec.delta = delta;
  spec.scale = scale;
  spec.epsilon = epsilon;
  if (derivative) {
    spec.value = [delta, scale](double x) { return -scale * bump_derivative(x, delta); };
    spec.slope = [delta, scale](double x) { return -scale * bump_second_derivative(x, delta); };
  } else {
    spec.value = [delta, scale](double x) { return scale * bump(x, delta); };
    spec.slope = [delta, scale](double x) { return scale * bump_derivative(x, delta); };
  }
  return finish_kernel(std::move(spec), order);
}

KernelSpec make_custom_kernel(std::function<double(double)> value,
                              std::function<double(double)> slope, std::size_t order,
                              double epsilon) {
  if (!value || !slope) throw InvalidArgument("custom kernel needs g and g'");
  if (!(epsilon >= 0.0)) throw InvalidArgument("coupling strength must be nonnegative");
  KernelSpec spec;
  spec.kind = KernelKind::Custom;
  spec.delta = 0.0;
  spec.scale = 1.0;
  spec.epsilon = epsilon;
  spec.value = std::move(value);
  spec.slope = std::move(slope);
  return finish_kernel(std::move(spec), order);
}

// ---------------------------------------------------------------------------
// Coupled map

double CoupledMapGrid::min_coupling_derivative() const {
  return coupling_d1.empty() ? 1.0 : *std::min_element(coupling_d1.begin(), coupling_d1.end());
}

std::vector<double> evaluate_at(const FourierDensity& c, const std::vector<double>& points) {
  std::vector<double> out(points.size());
  const Frequency top = c.max_frequency();
  const Frequency bottom = c.min_frequency();
  for (std::size_t j = 0; j < points.size(); ++j) {
    const Complex z = std::polar(1.0, kTwoPi * reduce_unit(points[j]));
    const Complex zinv = std::conj(z);
    Complex sum = c[0], up = 1.0, down = 1.0;
    for (Frequency k = 1; k <= top; ++k) {
      up *= z;
      sum += c[k] * up;
      if (-k >= bottom) {
        down *= zinv;
        sum += c[-k] * down;
      }
    }
    out[j] = sum.real();
  }
  return out;
}

const char* to_string(CouplingForm form) {
  return form == CouplingForm::Composed ? "composed" : "convolved";
}

FourierDensity composed_kernel(const CircleMap& map, const KernelSpec& kernel,
                               std::size_t oversampling) {
  const std::size_t m = oversampling * kernel.order();
  const std::vector<double> image = map.sample(m);
  std::vector<Complex> samples(m);
  for (std::size_t j = 0; j < m; ++j) samples[j] = kernel.value(reduce_unit(image[j]));
  return from_grid(samples, kernel.order(), true);
}

CoupledMapGrid build_coupled_map(const CircleMap& map, const KernelSpec& kernel,
                                 const FourierDensity& f, std::size_t oversampling) {
  if (!f.is_real()) throw InvalidArgument("build_coupled_map: density must be flagged real");
  if (kernel.order() != f.order()) {
    throw InvalidArgument("build_coupled_map: kernel order " + std::to_string(kernel.order()) +
                          " differs from density order " + std::to_string(f.order()));
  }
  if (!kernel.is_stable()) {
    throw InvalidArgument("coupling too strong: eps * ||g||_C1 = " +
                          std::to_string(kernel.stability_margin()) + " must be < 1");
  }
  const std::size_t m = oversampling * f.order();
  const double eps = kernel.epsilon;

  CoupledMapGrid out;
  out.density = f;
  out.epsilon = eps;
  out.form = kernel.form;
  out.base = map.sample(m);

  // (g * f)^ = g^ f^; its derivatives are diagonal in frequency.
  const FourierDensity field = convolve(kernel.coefficients, f);
  const FourierDensity field_d1 = differentiate(field);
  const FourierDensity field_d2 = differentiate(field_d1);
  const std::vector<double> g0 = real_parts(to_grid(field, oversampling));
  const std::vector<double> g1 = real_parts(to_grid(field_d1, oversampling));
  const std::vector<double> g2 = real_parts(to_grid(field_d2, oversampling));

  out.coupling.resize(m);
  out.coupling_d1.resize(m);
  out.coupling_d2.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(m);
    out.coupling[j] = x + eps * g0[j];
    out.coupling_d1[j] = 1.0 + eps * g1[j];
    out.coupling_d2[j] = eps * g2[j];
  }

  std::vector<double> shift;
  if (kernel.form == CouplingForm::Composed) {
    out.field_kernel = kernel.coefficients;
    out.field_points = out.base;
    shift = evaluate_at(field, out.base);
  } else {
    out.field_kernel = composed_kernel(map, kernel, oversampling);
    out.field_points.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      out.field_points[j] = static_cast<double>(j) / static_cast<double>(m);
    }
    shift = real_parts(to_grid(convolve(out.field_kernel, f), oversampling));
  }
  out.coupled.resize(m);
  for (std::size_t j = 0; j < m; ++j) out.coupled[j] = out.base[j] + eps * shift[j];

  const double min_d1 = out.min_coupling_derivative();
  if (!(min_d1 > 0.0)) {
    throw NonInvertibleCoupling(
        "coupling map I_f is not a diffeomorphism (min I_f' = " + std::to_string(min_d1) + ")",
        min_d1);
  }
  return out;
}

}  // namespace sctop
