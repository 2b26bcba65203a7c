#include "sctop/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/LU>

#include "sctop/errors.hpp"
#include "sctop/operator.hpp"

namespace sctop {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_initial(const FourierDensity& h0, const KernelSpec& kernel) {
  if (!h0.is_real()) throw InvalidArgument("initial density must be flagged real");
  if (h0[0] != Complex(1.0, 0.0)) {
    throw InvalidArgument("initial density must have unit mass (h^(0) = 1)");
  }
  if (h0.order() != kernel.order()) {
    throw InvalidArgument("initial density order differs from kernel order");
  }
}

IterationRecord make_record(std::size_t n, const FourierDensity& h, const FourierDensity& residual,
                            const SolverConfig& config) {
  IterationRecord r;
  r.n = n;
  r.residual_l1 = l1_norm(residual);
  r.residual_w11 = r.residual_l1 + l1_norm(differentiate(residual));
  r.residual_max = residual.coeffs().cwiseAbs().maxCoeff();
  r.error_l1 = config.reference ? l1_distance(h, *config.reference)
                                : std::numeric_limits<double>::quiet_NaN();
  r.mass = h[0].real();
  return r;
}

SolveStatus final_status(const SolverConfig& config) {
  return config.stop_on_tolerance ? SolveStatus::IterationLimit : SolveStatus::Completed;
}

}  // namespace

std::vector<double> SolveTrace::errors() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.error_l1);
  return out;
}

std::vector<double> SolveTrace::residuals() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.residual_l1);
  return out;
}

double SolveTrace::total_seconds() const {
  double total = 0.0;
  for (const auto& r : records) total += r.seconds;
  return total;
}

void SolverConfig::validate() const {
  if (max_iter < 1) throw InvalidArgument("solver max_iter must be at least 1");
  if (!(tolerance > 0.0)) throw InvalidArgument("solver tolerance must be positive");
}

FourierDensity uncoupled_fixed_density(const CircleMap& map, std::size_t order) {
  const OperatorMatrix lt =
      assemble_transfer(map.sample(kDefaultOversampling * order), order, "L_T");
  return leading_fixed_density(lt);
}

SolveResult sequential_solve(const CircleMap& map, const KernelSpec& kernel,
                             const FourierDensity& h0, const SolverConfig& config) {
  config.validate();
  check_initial(h0, kernel);
  SolveResult result;
  FourierDensity h = h0;
  for (std::size_t n = 0;; ++n) {
    const auto start = Clock::now();
    const CoupledMapGrid grid = build_coupled_map(map, kernel, h);
    const OperatorMatrix op = assemble_transfer(grid.coupled, h.order(), "L_{T_eps,h}");
    FourierDensity next = apply_operator(op, h);
    const double assembly = seconds_since(start);

    IterationRecord record = make_record(n, h, h - next, config);
    record.assembly_seconds = assembly;
    record.seconds = seconds_since(start);
    result.trace.records.push_back(record);

    if (config.stop_on_tolerance && record.residual_l1 <= config.tolerance) {
      result.status = SolveStatus::Converged;
      break;
    }
    if (n == config.max_iter) {
      result.status = final_status(config);
      break;
    }
    h = std::move(next);
  }
  result.density = std::move(h);
  return result;
}

SolveResult newton_solve(const CircleMap& map, const KernelSpec& kernel, const FourierDensity& h0,
                         const SolverConfig& config) {
  config.validate();
  check_initial(h0, kernel);
  const auto order = h0.order();
  const auto dim = static_cast<Eigen::Index>(2 * order);
  const auto zero = static_cast<Eigen::Index>(order - 1);

  // Nonzero frequencies, in logical order.
  std::vector<Eigen::Index> active;
  active.reserve(static_cast<std::size_t>(dim - 1));
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (r != zero) active.push_back(r);
  }

  SolveResult result;
  FourierDensity h = h0;
  for (std::size_t n = 0;; ++n) {
    const auto start = Clock::now();
    CoupledMapGrid grid = build_coupled_map(map, kernel, h);
    OperatorMatrix op = assemble_transfer(grid.coupled, order, "L_{T_eps,h}");
    const FourierDensity residual = h - apply_operator(op, h);
    const double assembly = seconds_since(start);

    IterationRecord record = make_record(n, h, residual, config);
    record.assembly_seconds = assembly;

    auto finish = [&](SolveStatus status) {
      record.seconds = seconds_since(start);
      result.trace.records.push_back(record);
      result.status = status;
    };
    if (config.stop_on_tolerance && record.residual_l1 <= config.tolerance) {
      finish(SolveStatus::Converged);
      break;
    }
    if (n == config.max_iter) {
      finish(final_status(config));
      break;
    }

    const auto& recs = result.trace.records;
    if (recs.size() >= 3) {
      const double r0 = recs[recs.size() - 3].residual_l1;
      const double r1 = recs[recs.size() - 2].residual_l1;
      const double r2 = recs[recs.size() - 1].residual_l1;
      const double r3 = record.residual_l1;
      if (r3 > 10.0 * r0 && r3 > r2 && r2 > r1 && r1 > r0 &&
          r3 > 1e3 * config.tolerance) {
        finish(SolveStatus::IterationLimit);
        throw ConvergenceError("Newton residual grew from " + std::to_string(r0) + " to " +
                                   std::to_string(r3) +
                                   " over three steps; initial density outside the basin",
                               n, r3);
      }
    }

    const auto derivative_start = Clock::now();
    const DerivativeAssembly d =
        assemble_frechet(kernel, std::move(grid), std::move(op), config.derivative);
    record.derivative_seconds = seconds_since(derivative_start);

    const auto solve_start = Clock::now();
    const Eigen::MatrixXcd system =
        (Eigen::MatrixXcd::Identity(dim, dim) - d.matrix)(active, active);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system);
    const double rcond = lu.rcond();
    const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(condition <= config.max_condition)) {
      finish(SolveStatus::IterationLimit);
      throw SingularSystem("Newton system I - D is ill-conditioned at iteration " +
                               std::to_string(n) + " (condition ~ " + std::to_string(condition) +
                               ")",
                           n, condition);
    }
    const Eigen::VectorXcd rhs = residual.coeffs()(active);
    const Eigen::VectorXcd update = lu.solve(rhs);
    record.solve_seconds = seconds_since(solve_start);

    h.coeffs()(active) -= update;
    h.symmetrize();
    record.seconds = seconds_since(start);
    result.trace.records.push_back(record);
  }
  result.density = std::move(h);
  return result;
}

SolveResult solve(const CircleMap& map, const KernelSpec& kernel, const FourierDensity& h0,
                  const SolverConfig& config) {
  return config.scheme == Scheme::Newton ? newton_solve(map, kernel, h0, config)
                                         : sequential_solve(map, kernel, h0, config);
}

// ---------------------------------------------------------------------------
// Rate fitting

namespace {

RateFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 3) throw InvalidArgument("rate fit needs at least three usable points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("rate fit needs distinct abscissae");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points = xs.size();
  return fit;
}

bool usable(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

RateFit rate_fit(std::span<const double> values, std::size_t first, std::size_t last) {
  if (first > last || last >= values.size()) {
    throw InvalidArgument("rate fit window [" + std::to_string(first) + ", " +
                          std::to_string(last) + "] outside a trace of length " +
                          std::to_string(values.size()));
  }
  std::vector<double> xs, ys;
  for (std::size_t n = first; n <= last; ++n) {
    if (!usable(values[n])) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log10(values[n]));
  }
  return linear_fit(xs, ys);
}

RateFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("loglog fit: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!usable(x[i]) || !usable(y[i])) continue;
    xs.push_back(std::log10(x[i]));
    ys.push_back(std::log10(y[i]));
  }
  return linear_fit(xs, ys);
}

std::vector<double> order_ratios(std::span<const double> errors, double floor) {
  std::vector<double> out;
  if (errors.size() < 2) return out;
  out.resize(errors.size() - 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t n = 0; n + 1 < errors.size(); ++n) {
    const double now = errors[n], next = errors[n + 1];
    if (usable(now) && usable(next) && now < 1.0 && next > floor) {
      out[n] = std::log10(next) / std::log10(now);
    }
  }
  return out;
}

const char* to_string(Scheme s) { return s == Scheme::Newton ? "newton" : "sequential"; }

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Completed: return "completed";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

const char* to_string(DerivativeModel m) {
  return m == DerivativeModel::Exact ? "exact" : "truncated";
}

}  // namespace sctop
