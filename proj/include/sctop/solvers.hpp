#pragma once

// Fixed points of F(h) = Pi_N L_{T_{eps,h}} h by sequential iteration
// h <- F(h) or by Newton's method on the nonzero frequencies:
//
//     h^_{n+1} = h^_n - (I - D)^{-1} (h^_n - L^_{N,h_n} h^_n),
//
// with D the Frechet derivative matrix at h_n. The k = 0 coefficient is
// excluded from the Newton system, so h^(0) = 1 is never touched.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sctop/dynamics.hpp"
#include "sctop/frechet.hpp"
#include "sctop/fourier.hpp"

namespace sctop {

enum class Scheme { Sequential, Newton };

struct IterationRecord {
  std::size_t n = 0;
  double residual_l1 = 0.0;    // ||h - F(h)||_{L1}
  double residual_w11 = 0.0;   // ||h - F(h)||_{W11}
  double residual_max = 0.0;   // max_k |(h - F(h))^(k)|
  double error_l1 = 0.0;       // ||h - h_ref||_{L1}, NaN without a reference
  double mass = 1.0;           // h^(0)
  double seconds = 0.0;
  double assembly_seconds = 0.0;
  double derivative_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct SolveTrace {
  std::vector<IterationRecord> records;

  std::vector<double> errors() const;
  std::vector<double> residuals() const;
  double total_seconds() const;
};

struct SolverConfig {
  Scheme scheme = Scheme::Newton;
  std::size_t max_iter = 35;
  double tolerance = 1e-13;
  /// false: run exactly max_iter steps regardless of the residual.
  bool stop_on_tolerance = true;
  std::optional<FourierDensity> reference;
  DerivativeModel derivative = DerivativeModel::Exact;
  /// Newton aborts when the estimated condition number of (I - D) exceeds this.
  double max_condition = 1e12;

  void validate() const;
};

enum class SolveStatus { Converged, Completed, IterationLimit };

struct SolveResult {
  FourierDensity density{1};
  SolveTrace trace;
  SolveStatus status = SolveStatus::IterationLimit;

  /// Tolerance reached, or the requested fixed number of steps completed.
  bool ok() const noexcept { return status != SolveStatus::IterationLimit; }
};

/// Throws InvalidArgument for a bad initial density (not real, h^(0) != 1)
/// and NonInvertibleCoupling if an iterate breaks the coupling.
SolveResult sequential_solve(const CircleMap& map, const KernelSpec& kernel,
                             const FourierDensity& h0, const SolverConfig& config);

/// Also throws SingularSystem (carrying the iteration) and ConvergenceError
/// when the residual grows 10x over three consecutive steps.
SolveResult newton_solve(const CircleMap& map, const KernelSpec& kernel, const FourierDensity& h0,
                         const SolverConfig& config);

SolveResult solve(const CircleMap& map, const KernelSpec& kernel, const FourierDensity& h0,
                  const SolverConfig& config);

/// h*_{0,N}: leading fixed density of Pi_N L_T.
FourierDensity uncoupled_fixed_density(const CircleMap& map, std::size_t order);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least squares of log10(values[n]) against n for n in [first, last].
/// Nonpositive entries are skipped; throws InvalidArgument with fewer than
/// three usable points.
RateFit rate_fit(std::span<const double> values, std::size_t first, std::size_t last);

/// Least squares of log10(y) against log10(x).
RateFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// log10(e_{n+1}) / log10(e_n) for consecutive pairs with floor < e_{n+1}
/// and e_n < 1. Entry n of the result is NaN where the pair is excluded.
std::vector<double> order_ratios(std::span<const double> errors, double floor);

const char* to_string(Scheme s);
const char* to_string(SolveStatus s);
const char* to_string(DerivativeModel m);

}  // namespace sctop
