#pragma once

// Frechet derivative of the discretised self-consistent operator
//
//     F(f) = Pi_N L_{T_{eps,f}} f,   T_{eps,f} = I_f o T,   I_f = Id + eps G(f),
//
// as a 2N x 2N matrix D in logical-frequency layout, column i = D e_i.
// D = Pi_N L_{T_{eps,f}} - eps * X, where X is the coupling correction.
//
// Two models for X are provided:
//
//  Exact      The derivative of the implemented (grid-quadrature) operator.
//             Integrating the correction term by parts against e_{-k} o I_f
//             gives
//               X[k, i] = 2 pi i k w(k) g^(i) (1/M) sum_j e_{-k}(T_{eps,f}(x_j)) e_i(T(x_j)) f(x_j),
//             one dense product over the grid and no division by I_f'.
//             For the convolved coupling g^ becomes (g o T)^ and e_i(T(x_j))
//             becomes e_i(x_j).
//
//  Truncated  (composed coupling only) D_{N,f}: every factor of the bracket
//               (L_T f)' G(e)/I_f' + (L_T f) G(e)'/I_f' - (L_T f) G(e) I_f''/(I_f')^2
//             replaced by its Fejer projection, the bracket re-projected, and
//             mapped through Pi_N L_{I_f}. Its distance to the exact
//             derivative is O(ln N / N).

#include <optional>

#include <Eigen/Dense>

#include "sctop/dynamics.hpp"
#include "sctop/fourier.hpp"
#include "sctop/operator.hpp"

namespace sctop {

enum class DerivativeModel { Exact, Truncated };

struct DerivativeAssembly {
  DerivativeModel model = DerivativeModel::Exact;
  CoupledMapGrid coupled_map;
  OperatorMatrix coupled_transfer;                   // Pi_N L_{T_{eps,f}}
  std::optional<OperatorMatrix> coupling_transfer;   // Pi_N L_{I_f} (truncated model)
  std::optional<FourierDensity> base_image;          // Pi_N L_T f (truncated model)
  Eigen::MatrixXcd correction;                       // X
  Eigen::MatrixXcd matrix;                           // D = L - eps X
};

/// G(e_k) = g^(k) e_k.
FourierDensity g_column_action(const KernelSpec& kernel, Frequency k);

DerivativeAssembly assemble_frechet(const CircleMap& map, const KernelSpec& kernel,
                                    const FourierDensity& f,
                                    DerivativeModel model = DerivativeModel::Exact);

/// Assembly from a frozen coupled map. kernel.epsilon multiplies the
/// correction; the grid may have been built with a different eps.
DerivativeAssembly assemble_frechet(const KernelSpec& kernel, CoupledMapGrid coupled_map,
                                    OperatorMatrix coupled_transfer,
                                    DerivativeModel model = DerivativeModel::Exact);

/// Pi_N L_{T_{eps,f}} f, the discretised self-consistent operator.
FourierDensity self_consistent_step(const CircleMap& map, const KernelSpec& kernel,
                                    const FourierDensity& f);

/// Lowest grid value of Pi_N I_f' accepted by the truncated model.
inline constexpr double kMinCouplingDerivative = 1e-8;

}  // namespace sctop
