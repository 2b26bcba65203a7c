#pragma once

// Experiment configuration and the studies behind the command-line driver.
//
// Each study has a run_* function returning its results in memory and a
// cmd_* wrapper that runs it and writes CSV files into cfg.output_dir.
//
// Config files are INI:
//
//   [map]       family = pinched-doubling | doubling | rotation, a, alpha
//   [kernel]    type = bump | bump-derivative, delta, scale
//   [coupling]  epsilon, form = composed | convolved
//   [solver]    order, scheme = newton | sequential, derivative = exact | truncated,
//               max_iter, tolerance, stop = tolerance | fixed
//   [rate]      reference_order, sweep (comma separated), iterations
//   [ensemble]  particles, burn_in, order, coupling_order
//   [output]    dir, profile_points
//   [run]       seed, self_test

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sctop/dynamics.hpp"
#include "sctop/ensemble.hpp"
#include "sctop/fourier.hpp"
#include "sctop/solvers.hpp"

namespace sctop {

struct ExperimentConfig {
  std::string map_family = "pinched-doubling";
  double a = 0.9;
  double alpha = 0.0;

  std::string kernel = "bump";
  double delta = 0.45;
  /// Unset: 1 for bump, 0.2 for bump-derivative.
  std::optional<double> scale;
  double epsilon = 0.025;
  CouplingForm coupling_form = CouplingForm::Composed;

  std::size_t order = 256;
  Scheme scheme = Scheme::Newton;
  DerivativeModel derivative = DerivativeModel::Exact;
  std::size_t max_iter = 35;
  double tolerance = 1e-13;
  bool stop_on_tolerance = true;

  std::size_t reference_order = 1024;
  std::vector<std::size_t> sweep = {2, 4, 8, 16, 32, 64, 128};
  std::size_t rate_iterations = 50;

  std::size_t particles = 1000000;
  std::size_t burn_in = 100;
  std::size_t ensemble_order = 64;
  /// Fourier order of g used for the particle coupling; 0 means cfg.order.
  std::size_t coupling_order = 0;

  std::filesystem::path output_dir = "out";
  std::size_t profile_points = 1024;

  std::uint64_t seed = 1;
  bool self_test = false;

  CircleMap make_map() const;
  KernelSpec make_kernel(std::size_t order) const;
  double kernel_scale() const;
  SolverConfig solver_config() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses an INI file. Unknown sections or keys and malformed values raise
/// ConfigError with the field name and line number.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Applies "section.key=value". Throws ConfigError.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
void set_field(ExperimentConfig& cfg, const std::string& field, const std::string& value);

/// The [section] key = value text that load_config reads back to cfg.
std::string to_ini(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Studies

struct FixedPointStudy {
  FourierDensity uncoupled{1};
  SolveResult coupled;
  std::vector<double> grid;      // x
  std::vector<double> h0;        // h*_0 on the grid
  std::vector<double> h_eps;     // h*_eps on the grid
  double peak_h0 = 0.0;          // argmax locations
  double peak_h_eps = 0.0;
  double peak_shift = 0.0;       // signed circular difference peak_h_eps - peak_h0
};

FixedPointStudy run_fixed_point(const ExperimentConfig& cfg);

struct ConvergenceStudy {
  FourierDensity uncoupled{1};
  FourierDensity reference{1};
  SolveResult sequential;
  SolveResult newton;
  RateFit sequential_rate;            // log10 residual vs n, n in [5, 30]
  std::vector<double> newton_ratios;  // order_ratios of the Newton errors
  double gap_orders = 0.0;            // log10(err_seq / err_newton) at the last n
  bool self_test = false;
};

/// Errors below this are treated as machine precision by the order and gap
/// diagnostics.
inline constexpr double kErrorFloor = 1e-14;

/// The error reference is a Newton run of cfg.max_iter steps, the same
/// length as the traced run.
/// Self-test mode replaces both traces with e_n = 10^(-n/2) and
/// e_n = 10^(-2^n) and checks that the fits recover them.
ConvergenceStudy run_convergence(const ExperimentConfig& cfg);

struct RatePoint {
  std::size_t order = 0;
  double distance = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  double seconds = 0.0;
  bool ok = false;
};

struct RateStudy {
  SolveResult reference;
  std::vector<RatePoint> points;
  RateFit fit;
};

RateStudy run_rate_n(const ExperimentConfig& cfg);

struct EnsembleStudy {
  ParticleEnsemble ensemble;
  FourierDensity empirical{1};
  FourierDensity spectral{1};    // Fejer projection of h*_eps to the ensemble order
  double distance = 0.0;
  std::uint64_t checksum = 0;    // FNV-1a over the position bytes
  double seconds = 0.0;
};

EnsembleStudy run_ensemble_study(const ExperimentConfig& cfg);

struct FejerContractionTrial {
  std::size_t order = 0;
  double norm = 0.0;
  double projected_norm = 0.0;
  double w11_norm = 0.0;
  double projected_w11_norm = 0.0;
};

struct FejerRatePoint {
  std::size_t order = 0;
  double error = 0.0;       // ||Pi_N f - f||_L1
  double scale = 0.0;       // (ln N / N) ||f'||_L1
  double ratio = 0.0;
};

struct FejerCheck {
  std::vector<FejerContractionTrial> trials;
  std::vector<FejerRatePoint> rates;
  double max_excess = 0.0;      // max ||Pi_N f|| - ||f|| over L1 and W11
  double median_ratio = 0.0;
  bool contraction_ok = false;  // max_excess <= 1e-10
  bool rate_ok = false;         // last ratio <= 2 * median
};

FejerCheck run_fejer_check(std::uint64_t seed, std::size_t trials = 200);

std::uint64_t fnv1a(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Commands: run, write CSVs, report.

struct CommandReport {
  bool ok = false;
  std::vector<std::filesystem::path> files;
  std::vector<std::pair<std::string, std::string>> summary;
};

CommandReport cmd_fixed_point(const ExperimentConfig& cfg);
CommandReport cmd_convergence(const ExperimentConfig& cfg);
CommandReport cmd_rate_n(const ExperimentConfig& cfg);
CommandReport cmd_ensemble(const ExperimentConfig& cfg);
CommandReport cmd_fejer_check(const ExperimentConfig& cfg);

}  // namespace sctop
