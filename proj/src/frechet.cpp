#include "sctop/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sctop/errors.hpp"
#include "sctop/fft.hpp"
#include "sctop/kernels.hpp"

namespace sctop {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> real_grid(const FourierDensity& h, std::size_t oversampling) {
  const GridFunction g = to_grid(h, oversampling);
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = g.values[static_cast<Eigen::Index>(j)].real();
  return out;
}

Eigen::MatrixXcd exact_correction(const CoupledMapGrid& grid) {
  const std::size_t order = grid.order();
  const std::size_t oversampling = grid.size() / order;
  const std::vector<double> density = real_grid(grid.density, oversampling);
  Eigen::MatrixXcd x =
      kernels::parallel::coupling_quadrature(grid.coupled, grid.field_points, density, order);
  const FejerWeights w(order);
  const long n = static_cast<long>(order);
  for (long k = -n + 1; k <= n; ++k) {
    const Complex row_scale(0.0, kTwoPi * static_cast<double>(k) * w(k));
    for (long i = -n + 1; i <= n; ++i) {
      x(k + n - 1, i + n - 1) *= row_scale * grid.field_kernel[i];
    }
  }
  return x;
}

struct TruncatedParts {
  Eigen::MatrixXcd correction;
  OperatorMatrix coupling_transfer;
  FourierDensity base_image;
};

TruncatedParts truncated_correction(const KernelSpec& kernel, const CoupledMapGrid& grid) {
  const std::size_t order = grid.order();
  const std::size_t m = grid.size();
  const std::size_t oversampling = m / order;
  const long n = static_cast<long>(order);
  const FejerWeights w(order);

  // Pi_N L_T f and its derivative.
  const OperatorMatrix base_transfer = assemble_transfer(grid.base, order, "L_T");
  FourierDensity p = apply_operator(base_transfer, grid.density);
  const std::vector<double> p0 = real_grid(p, oversampling);
  const std::vector<double> p1 = real_grid(differentiate(p), oversampling);

  // Pi_N I_f' from the (band-limited) grid samples of the frozen coupling.
  std::vector<Complex> d1(grid.coupling_d1.begin(), grid.coupling_d1.end());
  const FourierDensity j_coeffs = project_fejer(from_grid(d1, order, true));
  const std::vector<double> j0 = real_grid(j_coeffs, oversampling);
  const std::vector<double> j1 = real_grid(differentiate(j_coeffs), oversampling);
  const double j_min = *std::min_element(j0.begin(), j0.end());
  if (!(j_min >= kMinCouplingDerivative)) {
    throw NonInvertibleCoupling("Fejer-projected I_f' drops to " + std::to_string(j_min), j_min);
  }

  // Comb_k = Pi_N[ G_k (U + 2 pi i k V) ] with G_k = w(k) g^(k) e_k,
  // U = P'/J - P J'/J^2 and V = P/J. The product with e_k is a shift of
  // the grid spectra of U and V, so two FFTs serve every column.
  std::vector<Complex> u(m), v(m), u_hat(m), v_hat(m);
  for (std::size_t j = 0; j < m; ++j) {
    u[j] = p1[j] / j0[j] - p0[j] * j1[j] / (j0[j] * j0[j]);
    v[j] = p0[j] / j0[j];
  }
  fft::forward(u, u_hat);
  fft::forward(v, v_hat);
  const double inv_m = 1.0 / static_cast<double>(m);

  Eigen::MatrixXcd comb = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (long k = -n + 1; k <= n; ++k) {
    const Complex gk = w(k) * kernel.hat(k);
    if (gk == Complex{}) continue;
    const Complex ik(0.0, kTwoPi * static_cast<double>(k));
    for (long mfreq = -n + 1; mfreq <= n; ++mfreq) {
      const std::size_t shift = fft::wrap(mfreq - k, m);
      comb(mfreq + n - 1, k + n - 1) =
          w(mfreq) * gk * (u_hat[shift] + ik * v_hat[shift]) * inv_m;
    }
  }

  OperatorMatrix coupling_transfer = assemble_transfer(grid.coupling, order, "L_{I_f}");
  Eigen::MatrixXcd correction = coupling_transfer.entries * comb;
  return {std::move(correction), std::move(coupling_transfer), std::move(p)};
}

}  // namespace

FourierDensity g_column_action(const KernelSpec& kernel, Frequency k) {
  FourierDensity out(kernel.order(), false);
  out[k] = kernel.hat(k);
  return out;
}

DerivativeAssembly assemble_frechet(const KernelSpec& kernel, CoupledMapGrid coupled_map,
                                    OperatorMatrix coupled_transfer, DerivativeModel model) {
  if (kernel.order() != coupled_map.order() || coupled_transfer.order != coupled_map.order()) {
    throw InvalidArgument("assemble_frechet: kernel, coupled map and operator orders differ");
  }
  if (!(coupled_map.min_coupling_derivative() > 0.0)) {
    throw NonInvertibleCoupling("assemble_frechet: I_f' not positive",
                                coupled_map.min_coupling_derivative());
  }
  if (model == DerivativeModel::Truncated && coupled_map.form != CouplingForm::Composed) {
    throw InvalidArgument("assemble_frechet: the truncated derivative needs the composed coupling");
  }
  DerivativeAssembly out;
  out.model = model;
  if (model == DerivativeModel::Exact) {
    out.correction = exact_correction(coupled_map);
  } else {
    TruncatedParts parts = truncated_correction(kernel, coupled_map);
    out.correction = std::move(parts.correction);
    out.coupling_transfer = std::move(parts.coupling_transfer);
    out.base_image = std::move(parts.base_image);
  }
  out.matrix = coupled_transfer.entries - kernel.epsilon * out.correction;
  out.coupled_map = std::move(coupled_map);
  out.coupled_transfer = std::move(coupled_transfer);
  return out;
}

DerivativeAssembly assemble_frechet(const CircleMap& map, const KernelSpec& kernel,
                                    const FourierDensity& f, DerivativeModel model) {
  CoupledMapGrid grid = build_coupled_map(map, kernel, f);
  OperatorMatrix transfer = assemble_transfer(grid.coupled, f.order(), "L_{T_eps,f}");
  return assemble_frechet(kernel, std::move(grid), std::move(transfer), model);
}

FourierDensity self_consistent_step(const CircleMap& map, const KernelSpec& kernel,
                                    const FourierDensity& f) {
  const CoupledMapGrid grid = build_coupled_map(map, kernel, f);
  return apply_operator(assemble_transfer(grid.coupled, f.order()), f);
}

}  // namespace sctop
