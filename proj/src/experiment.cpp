#include "sctop/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sctop/errors.hpp"
#include "sctop/operator.hpp"

namespace sctop {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& field, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("config field '" + field + "': cannot use '" + value + "' (" + expected + ")",
                    field);
}

double parse_double(const std::string& field, const std::string& value) {
  double out = 0.0;
  const std::string v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(field, value, "expected a finite number");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& field, const std::string& value) {
  std::uint64_t out = 0;
  const std::string v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_value(field, value, "expected a nonnegative integer");
  }
  return out;
}

std::size_t parse_size(const std::string& field, const std::string& value) {
  return static_cast<std::size_t>(parse_u64(field, value));
}

bool parse_bool(const std::string& field, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(field, value, "expected true or false");
}

std::vector<std::size_t> parse_sizes(const std::string& field, const std::string& value) {
  std::vector<std::size_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_size(field, item));
  if (out.empty()) bad_value(field, value, "expected a comma separated list of integers");
  return out;
}

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Line number of each "section.key" and "[section]" in the INI text, for
// diagnostics; property_tree does not keep them.
std::map<std::string, std::size_t> index_lines(const std::string& text) {
  std::map<std::string, std::size_t> lines;
  std::istringstream in(text);
  std::string line, section;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      lines.emplace("[" + section + "]", n);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) continue;
    lines.emplace(section + "." + trim(t.substr(0, eq)), n);
  }
  return lines;
}

// ---------------------------------------------------------------------------
// CSV

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : path_(path) {
    out_.open(path);
    if (!out_) throw InvalidArgument("cannot open " + path.string() + " for writing");
    out_ << std::setprecision(17) << header << '\n';
  }

  template <typename... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << values, first = false), ...);
    out_ << '\n';
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::filesystem::path prepare_dir(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir;
}

std::filesystem::path write_summary(const std::filesystem::path& path,
                                    const std::vector<std::pair<std::string, std::string>>& kv) {
  CsvWriter csv(path, "key,value");
  for (const auto& [k, v] : kv) csv.row(k, v);
  return path;
}

void write_trace(const std::filesystem::path& path, const SolveTrace& trace) {
  CsvWriter csv(path, "n,residual_l1,residual_w11,residual_max,error_l1,mass");
  for (const auto& r : trace.records) {
    csv.row(r.n, r.residual_l1, r.residual_w11, r.residual_max, r.error_l1, r.mass);
  }
}

// Timings live in their own files so that every other output is
// byte-identical across runs.
void write_timings(const std::filesystem::path& path, const SolveTrace& trace) {
  CsvWriter csv(path, "n,seconds,assembly_seconds,derivative_seconds,solve_seconds");
  for (const auto& r : trace.records) {
    csv.row(r.n, r.seconds, r.assembly_seconds, r.derivative_seconds, r.solve_seconds);
  }
}

using Summary = std::vector<std::pair<std::string, std::string>>;

void add(Summary& s, const std::string& key, double v) { s.emplace_back(key, format_double(v)); }
void add(Summary& s, const std::string& key, std::size_t v) {
  s.emplace_back(key, std::to_string(v));
}
void add(Summary& s, const std::string& key, const std::string& v) { s.emplace_back(key, v); }

void add_config(Summary& s, const ExperimentConfig& cfg) {
  add(s, "map", cfg.make_map().name());
  add(s, "kernel", cfg.kernel);
  add(s, "delta", cfg.delta);
  add(s, "scale", cfg.kernel_scale());
  add(s, "epsilon", cfg.epsilon);
  add(s, "coupling_form", std::string(to_string(cfg.coupling_form)));
  add(s, "order", cfg.order);
}

void add_solve(Summary& s, const std::string& prefix, const SolveResult& r) {
  const auto& last = r.trace.records.back();
  add(s, prefix + "status", std::string(to_string(r.status)));
  add(s, prefix + "iterations", last.n);
  add(s, prefix + "residual_l1", last.residual_l1);
  add(s, prefix + "residual_w11", last.residual_w11);
  add(s, prefix + "mass", last.mass);
}

void add_timings(Summary& s, const std::string& prefix, const SolveResult& r) {
  double assembly = 0.0, derivative = 0.0, solve = 0.0;
  for (const auto& rec : r.trace.records) {
    assembly += rec.assembly_seconds;
    derivative += rec.derivative_seconds;
    solve += rec.solve_seconds;
  }
  add(s, prefix + "seconds", r.trace.total_seconds());
  add(s, prefix + "assembly_seconds", assembly);
  add(s, prefix + "derivative_seconds", derivative);
  add(s, prefix + "solve_seconds", solve);
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double circular_difference(double a, double b) {
  double d = a - b;
  d -= std::round(d);
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

double ExperimentConfig::kernel_scale() const {
  if (scale) return *scale;
  return kernel == "bump-derivative" ? 0.2 : 1.0;
}

CircleMap ExperimentConfig::make_map() const {
  if (map_family == "pinched-doubling") return CircleMap::pinched_doubling(a);
  if (map_family == "doubling") return CircleMap::doubling();
  if (map_family == "rotation") return CircleMap::rotation(alpha);
  throw ConfigError("config field 'map.family': unknown map '" + map_family + "'", "map.family");
}

KernelSpec ExperimentConfig::make_kernel(std::size_t kernel_order) const {
  if (kernel != "bump" && kernel != "bump-derivative") {
    throw ConfigError("config field 'kernel.type': unknown kernel '" + kernel + "'", "kernel.type");
  }
  KernelSpec k = make_bump_kernel(delta, kernel_scale(), kernel == "bump-derivative", kernel_order,
                                  epsilon);
  k.form = coupling_form;
  return k;
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig s;
  s.scheme = scheme;
  s.max_iter = max_iter;
  s.tolerance = tolerance;
  s.stop_on_tolerance = stop_on_tolerance;
  s.derivative = derivative;
  return s;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why, field);
  };
  if (map_family != "pinched-doubling" && map_family != "doubling" && map_family != "rotation") {
    fail("map.family", "unknown map '" + map_family + "'");
  }
  if (map_family == "pinched-doubling" && !(std::abs(a) < 1.0)) fail("map.a", "need |a| < 1");
  if (kernel != "bump" && kernel != "bump-derivative") {
    fail("kernel.type", "unknown kernel '" + kernel + "'");
  }
  if (!(delta > 0.0 && delta <= 0.5)) fail("kernel.delta", "need 0 < delta <= 0.5");
  if (!(epsilon >= 0.0)) fail("coupling.epsilon", "need epsilon >= 0");
  if (derivative == DerivativeModel::Truncated && coupling_form != CouplingForm::Composed) {
    fail("solver.derivative", "truncated needs coupling.form = composed");
  }
  if (order < 1) fail("solver.order", "need order >= 1");
  if (max_iter < 1) fail("solver.max_iter", "need max_iter >= 1");
  if (!(tolerance > 0.0)) fail("solver.tolerance", "need tolerance > 0");
  if (rate_iterations < 1) fail("rate.iterations", "need iterations >= 1");
  for (const auto n : sweep) {
    if (n < 1) fail("rate.sweep", "orders must be >= 1");
  }
  if (particles < 1) fail("ensemble.particles", "need particles >= 1");
  if (ensemble_order < 1) fail("ensemble.order", "need order >= 1");
  if (profile_points < 1) fail("output.profile_points", "need profile_points >= 1");
  if (output_dir.empty()) fail("output.dir", "empty path");
}

void set_field(ExperimentConfig& cfg, const std::string& field, const std::string& raw) {
  const std::string value = trim(raw);
  if (field == "map.family") cfg.map_family = value;
  else if (field == "map.a") cfg.a = parse_double(field, value);
  else if (field == "map.alpha") cfg.alpha = parse_double(field, value);
  else if (field == "kernel.type") cfg.kernel = value;
  else if (field == "kernel.delta") cfg.delta = parse_double(field, value);
  else if (field == "kernel.scale") cfg.scale = parse_double(field, value);
  else if (field == "coupling.epsilon") cfg.epsilon = parse_double(field, value);
  else if (field == "coupling.form") {
    if (value == "composed") cfg.coupling_form = CouplingForm::Composed;
    else if (value == "convolved") cfg.coupling_form = CouplingForm::Convolved;
    else bad_value(field, value, "expected composed or convolved");
  }
  else if (field == "solver.order") cfg.order = parse_size(field, value);
  else if (field == "solver.scheme") {
    if (value == "newton") cfg.scheme = Scheme::Newton;
    else if (value == "sequential") cfg.scheme = Scheme::Sequential;
    else bad_value(field, value, "expected newton or sequential");
  } else if (field == "solver.derivative") {
    if (value == "exact") cfg.derivative = DerivativeModel::Exact;
    else if (value == "truncated") cfg.derivative = DerivativeModel::Truncated;
    else bad_value(field, value, "expected exact or truncated");
  } else if (field == "solver.max_iter") cfg.max_iter = parse_size(field, value);
  else if (field == "solver.tolerance") cfg.tolerance = parse_double(field, value);
  else if (field == "solver.stop") {
    if (value == "tolerance") cfg.stop_on_tolerance = true;
    else if (value == "fixed") cfg.stop_on_tolerance = false;
    else bad_value(field, value, "expected tolerance or fixed");
  } else if (field == "rate.reference_order") cfg.reference_order = parse_size(field, value);
  else if (field == "rate.sweep") cfg.sweep = parse_sizes(field, value);
  else if (field == "rate.iterations") cfg.rate_iterations = parse_size(field, value);
  else if (field == "ensemble.particles") cfg.particles = parse_size(field, value);
  else if (field == "ensemble.burn_in") cfg.burn_in = parse_size(field, value);
  else if (field == "ensemble.order") cfg.ensemble_order = parse_size(field, value);
  else if (field == "ensemble.coupling_order") cfg.coupling_order = parse_size(field, value);
  else if (field == "output.dir") cfg.output_dir = value;
  else if (field == "output.profile_points") cfg.profile_points = parse_size(field, value);
  else if (field == "run.seed") cfg.seed = parse_u64(field, value);
  else if (field == "run.self_test") cfg.self_test = parse_bool(field, value);
  else throw ConfigError("unknown config field '" + field + "'", field);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value",
                      assignment);
  }
  set_field(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message(), "",
                      e.line());
  }
  const auto lines = index_lines(text);
  auto line_of = [&](const std::string& key) -> std::size_t {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };

  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      const std::size_t line = line_of("." + section);
      throw ConfigError(source + ":" + std::to_string(line) + ": key '" + section +
                            "' outside any section",
                        section, line);
    }
    for (const auto& [key, node] : body) {
      const std::string field = section + "." + key;
      const std::size_t line = line_of(field);
      try {
        set_field(cfg, field, node.data());
      } catch (const ConfigError& e) {
        throw ConfigError(source + ":" + std::to_string(line) + ": " + e.what(), field, line);
      }
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const std::size_t line = line_of(e.field());
    throw ConfigError(source + ":" + std::to_string(line) + ": " + e.what(), e.field(), line);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string(), "");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string to_ini(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "[map]\nfamily = " << cfg.map_family << "\na = " << cfg.a << "\nalpha = " << cfg.alpha
     << "\n\n[kernel]\ntype = " << cfg.kernel << "\ndelta = " << cfg.delta
     << "\nscale = " << cfg.kernel_scale() << "\n\n[coupling]\nepsilon = " << cfg.epsilon
     << "\nform = " << to_string(cfg.coupling_form)
     << "\n\n[solver]\norder = " << cfg.order << "\nscheme = " << to_string(cfg.scheme)
     << "\nderivative = " << to_string(cfg.derivative) << "\nmax_iter = " << cfg.max_iter
     << "\ntolerance = " << cfg.tolerance
     << "\nstop = " << (cfg.stop_on_tolerance ? "tolerance" : "fixed")
     << "\n\n[rate]\nreference_order = " << cfg.reference_order << "\nsweep = " << join(cfg.sweep)
     << "\niterations = " << cfg.rate_iterations << "\n\n[ensemble]\nparticles = " << cfg.particles
     << "\nburn_in = " << cfg.burn_in << "\norder = " << cfg.ensemble_order
     << "\ncoupling_order = " << cfg.coupling_order << "\n\n[output]\ndir = "
     << cfg.output_dir.string() << "\nprofile_points = " << cfg.profile_points
     << "\n\n[run]\nseed = " << cfg.seed << "\nself_test = " << (cfg.self_test ? "true" : "false")
     << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Studies

FixedPointStudy run_fixed_point(const ExperimentConfig& cfg) {
  cfg.validate();
  const CircleMap map = cfg.make_map();
  const KernelSpec kernel = cfg.make_kernel(cfg.order);
  FixedPointStudy out;
  out.uncoupled = uncoupled_fixed_density(map, cfg.order);
  out.coupled = solve(map, kernel, out.uncoupled, cfg.solver_config());
  out.h0 = sample_uniform(out.uncoupled, cfg.profile_points);
  out.h_eps = sample_uniform(out.coupled.density, cfg.profile_points);
  out.grid.resize(cfg.profile_points);
  for (std::size_t j = 0; j < cfg.profile_points; ++j) {
    out.grid[j] = static_cast<double>(j) / static_cast<double>(cfg.profile_points);
  }
  out.peak_h0 = out.grid[argmax(out.h0)];
  out.peak_h_eps = out.grid[argmax(out.h_eps)];
  out.peak_shift = circular_difference(out.peak_h_eps, out.peak_h0);
  return out;
}

ConvergenceStudy run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  ConvergenceStudy out;
  out.self_test = cfg.self_test;
  if (cfg.self_test) {
    // Geometric trace 10^(-n/2) and a quadratic one 10^(-2^n).
    for (std::size_t n = 0; n <= cfg.max_iter; ++n) {
      IterationRecord seq;
      seq.n = n;
      seq.residual_l1 = seq.error_l1 = std::pow(10.0, -0.5 * static_cast<double>(n));
      out.sequential.trace.records.push_back(seq);
      IterationRecord nw;
      nw.n = n;
      const double exponent = n < 9 ? std::ldexp(1.0, static_cast<int>(n)) : 1e9;
      nw.residual_l1 = nw.error_l1 = exponent < 300 ? std::pow(10.0, -exponent) : 0.0;
      out.newton.trace.records.push_back(nw);
    }
    out.sequential.status = out.newton.status = SolveStatus::Completed;
  } else {
    const CircleMap map = cfg.make_map();
    const KernelSpec kernel = cfg.make_kernel(cfg.order);
    out.uncoupled = uncoupled_fixed_density(map, cfg.order);

    SolverConfig ref = cfg.solver_config();
    ref.scheme = Scheme::Newton;
    ref.stop_on_tolerance = false;
    out.reference = newton_solve(map, kernel, out.uncoupled, ref).density;

    SolverConfig run = cfg.solver_config();
    run.stop_on_tolerance = false;
    run.reference = out.reference;
    run.scheme = Scheme::Sequential;
    out.sequential = sequential_solve(map, kernel, out.uncoupled, run);
    run.scheme = Scheme::Newton;
    out.newton = newton_solve(map, kernel, out.uncoupled, run);
  }

  const auto seq_res = out.sequential.trace.residuals();
  if (seq_res.size() > 30) out.sequential_rate = rate_fit(seq_res, 5, 30);
  const auto newton_err = out.newton.trace.errors();
  out.newton_ratios = order_ratios(newton_err, kErrorFloor);
  const double seq_last = out.sequential.trace.records.back().error_l1;
  const double newton_last = std::max(newton_err.back(), std::numeric_limits<double>::epsilon());
  out.gap_orders = std::log10(seq_last / newton_last);
  return out;
}

RateStudy run_rate_n(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t largest = *std::max_element(cfg.sweep.begin(), cfg.sweep.end());
  if (!is_power_of_two(cfg.reference_order) || cfg.reference_order < 4 * largest) {
    throw ConfigError("config field 'rate.reference_order': need a power of two >= 4 x " +
                          std::to_string(largest),
                      "rate.reference_order");
  }
  const CircleMap map = cfg.make_map();
  SolverConfig solver = cfg.solver_config();
  solver.scheme = Scheme::Newton;
  solver.max_iter = cfg.rate_iterations;

  auto solve_at = [&](std::size_t n) {
    const KernelSpec kernel = cfg.make_kernel(n);
    return newton_solve(map, kernel, uncoupled_fixed_density(map, n), solver);
  };

  RateStudy out;
  out.reference = solve_at(cfg.reference_order);
  out.points.resize(cfg.sweep.size());
  std::vector<SolveResult> results(cfg.sweep.size());
  std::vector<std::string> failures(cfg.sweep.size());

  // Independent solves; the kernels inside run single-threaded here.
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(cfg.sweep.size()); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      const auto start = Clock::now();
      results[idx] = solve_at(cfg.sweep[idx]);
      out.points[idx].seconds = seconds_since(start);
    } catch (const std::exception& e) {
      failures[idx] = e.what();
    }
  }
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
    if (!failures[i].empty()) {
      throw ConvergenceError("rate-n solve at N = " + std::to_string(cfg.sweep[i]) +
                                 " failed: " + failures[i],
                             0, std::numeric_limits<double>::quiet_NaN());
    }
    RatePoint& p = out.points[i];
    p.order = cfg.sweep[i];
    p.distance = l1_distance(results[i].density, out.reference.density);
    p.residual = results[i].trace.records.back().residual_l1;
    p.iterations = results[i].trace.records.back().n;
    p.ok = results[i].ok();
  }
  std::vector<double> xs, ys;
  for (const auto& p : out.points) {
    xs.push_back(static_cast<double>(p.order));
    ys.push_back(p.distance);
  }
  if (xs.size() >= 3) {
    try {
      out.fit = loglog_fit(xs, ys);
    } catch (const InvalidArgument&) {
      out.fit.slope = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

std::uint64_t fnv1a(const std::vector<double>& values) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (const unsigned char b : bytes) {
      hash ^= b;
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

EnsembleStudy run_ensemble_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const CircleMap map = cfg.make_map();
  const std::size_t coupling_order = cfg.coupling_order ? cfg.coupling_order : cfg.order;
  EnsembleStudy out;

  const KernelSpec kernel = cfg.make_kernel(cfg.order);
  SolverConfig solver = cfg.solver_config();
  const SolveResult spectral = solve(map, kernel, uncoupled_fixed_density(map, cfg.order), solver);
  const std::size_t order = cfg.ensemble_order;
  out.spectral = project_fejer(spectral.density.resized(order));

  const auto start = Clock::now();
  const KernelSpec particle_kernel =
      coupling_order == cfg.order ? kernel : cfg.make_kernel(coupling_order);
  out.ensemble = make_uniform_ensemble(cfg.particles, cfg.seed);
  run_ensemble(out.ensemble, map, particle_kernel, cfg.burn_in);
  out.seconds = seconds_since(start);

  out.empirical = empirical_density(out.ensemble, order);
  out.distance = l1_distance(out.empirical, out.spectral);
  out.checksum = fnv1a(out.ensemble.positions);
  return out;
}

FejerCheck run_fejer_check(std::uint64_t seed, std::size_t trials) {
  FejerCheck out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(1, 32);

  // (a) random real trigonometric polynomials of order 2N projected to N.
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = pick(rng);
    const std::size_t big = 2 * n;
    FourierDensity f(big, true);
    f[0] = normal(rng);
    for (long k = 1; k < static_cast<long>(big); ++k) {
      f[k] = Complex(normal(rng), normal(rng)) / (1.0 + 0.1 * static_cast<double>(k * k));
      f[-k] = std::conj(f[k]);
    }
    const FourierDensity p = project_fejer(f.resized(n)).resized(big);
    FejerContractionTrial trial;
    trial.order = n;
    trial.norm = l1_norm(f);
    trial.projected_norm = l1_norm(p);
    trial.w11_norm = w11_norm(f);
    trial.projected_w11_norm = w11_norm(p);
    out.max_excess = std::max({out.max_excess, trial.projected_norm - trial.norm,
                               trial.projected_w11_norm - trial.w11_norm});
    out.trials.push_back(trial);
  }
  out.contraction_ok = out.max_excess <= 1e-10;

  // (b) f = 1 + cos 2 pi x + 0.3 sin 6 pi x.
  FourierDensity f(4, true);
  f[0] = 1.0;
  f[1] = f[-1] = 0.5;
  f[3] = Complex(0.0, -0.15);
  f[-3] = Complex(0.0, 0.15);
  const double df = l1_norm(differentiate(f));
  std::vector<double> ratios;
  for (std::size_t n = 8; n <= 512; n *= 2) {
    FejerRatePoint p;
    p.order = n;
    p.error = l1_distance(project_fejer(f.resized(n)), f);
    p.scale = std::log(static_cast<double>(n)) / static_cast<double>(n) * df;
    p.ratio = p.error / p.scale;
    ratios.push_back(p.ratio);
    out.rates.push_back(p);
  }
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  out.median_ratio = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  out.rate_ok = ratios.back() <= 2.0 * out.median_ratio;
  return out;
}

// ---------------------------------------------------------------------------
// Commands

CommandReport cmd_fixed_point(const ExperimentConfig& cfg) {
  const FixedPointStudy study = run_fixed_point(cfg);
  const auto dir = prepare_dir(cfg);
  CommandReport report;
  {
    CsvWriter csv(dir / "profile.csv", "x,h0,h_eps");
    for (std::size_t j = 0; j < study.grid.size(); ++j) {
      csv.row(study.grid[j], study.h0[j], study.h_eps[j]);
    }
    report.files.push_back(csv.path());
  }
  write_trace(dir / "fixed_point_trace.csv", study.coupled.trace);
  report.files.push_back(dir / "fixed_point_trace.csv");
  write_timings(dir / "fixed_point_timings.csv", study.coupled.trace);
  report.files.push_back(dir / "fixed_point_timings.csv");

  Summary& s = report.summary;
  add_config(s, cfg);
  add(s, "scheme", std::string(to_string(cfg.scheme)));
  add_solve(s, "", study.coupled);
  add(s, "peak_h0", study.peak_h0);
  add(s, "peak_h_eps", study.peak_h_eps);
  add(s, "peak_shift", study.peak_shift);
  add(s, "max_h0", *std::max_element(study.h0.begin(), study.h0.end()));
  add(s, "max_h_eps", *std::max_element(study.h_eps.begin(), study.h_eps.end()));
  report.files.push_back(write_summary(dir / "fixed_point_summary.csv", s));
  Summary timings;
  add_timings(timings, "", study.coupled);
  report.files.push_back(write_summary(dir / "fixed_point_timing_summary.csv", timings));
  report.ok = study.coupled.ok();
  return report;
}

CommandReport cmd_convergence(const ExperimentConfig& cfg) {
  const ConvergenceStudy study = run_convergence(cfg);
  const auto dir = prepare_dir(cfg);
  CommandReport report;
  {
    CsvWriter csv(dir / "convergence.csv", "n,err_seq,err_newton,res_seq,res_newton");
    const auto& seq = study.sequential.trace.records;
    const auto& nw = study.newton.trace.records;
    for (std::size_t n = 0; n < std::min(seq.size(), nw.size()); ++n) {
      csv.row(n, seq[n].error_l1, nw[n].error_l1, seq[n].residual_l1, nw[n].residual_l1);
    }
    report.files.push_back(csv.path());
  }
  {
    CsvWriter csv(dir / "newton_order.csv", "n,ratio");
    for (std::size_t n = 0; n < study.newton_ratios.size(); ++n) {
      csv.row(n, study.newton_ratios[n]);
    }
    report.files.push_back(csv.path());
  }

  Summary& s = report.summary;
  add(s, "self_test", std::string(study.self_test ? "true" : "false"));
  if (!study.self_test) {
    add_config(s, cfg);
    add_solve(s, "sequential_", study.sequential);
    add_solve(s, "newton_", study.newton);
    Summary timings;
    add_timings(timings, "sequential_", study.sequential);
    add_timings(timings, "newton_", study.newton);
    report.files.push_back(write_summary(dir / "convergence_timings.csv", timings));
  }
  add(s, "sequential_slope", study.sequential_rate.slope);
  add(s, "sequential_r2", study.sequential_rate.r2);
  add(s, "sequential_factor", std::pow(10.0, study.sequential_rate.slope));
  add(s, "gap_orders", study.gap_orders);
  bool ok = study.sequential.ok() && study.newton.ok();
  if (study.self_test) {
    std::vector<double> finite;
    for (const double r : study.newton_ratios) {
      if (std::isfinite(r)) finite.push_back(r);
    }
    const bool slope_ok = std::abs(study.sequential_rate.slope + 0.5) < 1e-12;
    const bool order_ok = !finite.empty() && std::all_of(finite.begin(), finite.end(), [](double r) {
      return std::abs(r - 2.0) < 1e-12;
    });
    add(s, "self_test_ok", std::string(slope_ok && order_ok ? "true" : "false"));
    ok = ok && slope_ok && order_ok;
  }
  report.files.push_back(write_summary(dir / "convergence_summary.csv", s));
  report.ok = ok;
  return report;
}

CommandReport cmd_rate_n(const ExperimentConfig& cfg) {
  const RateStudy study = run_rate_n(cfg);
  const auto dir = prepare_dir(cfg);
  CommandReport report;
  {
    CsvWriter csv(dir / "rate_n.csv", "N,l1_distance,residual,iterations");
    for (const auto& p : study.points) csv.row(p.order, p.distance, p.residual, p.iterations);
    report.files.push_back(csv.path());
  }
  {
    CsvWriter csv(dir / "rate_n_timings.csv", "N,seconds");
    csv.row(cfg.reference_order, study.reference.trace.total_seconds());
    for (const auto& p : study.points) csv.row(p.order, p.seconds);
    report.files.push_back(csv.path());
  }
  Summary& s = report.summary;
  add_config(s, cfg);
  add(s, "reference_order", cfg.reference_order);
  add_solve(s, "reference_", study.reference);
  add(s, "slope", study.fit.slope);
  add(s, "intercept", study.fit.intercept);
  add(s, "r2", study.fit.r2);
  report.files.push_back(write_summary(dir / "rate_n_summary.csv", s));
  report.ok = study.reference.ok() &&
              std::all_of(study.points.begin(), study.points.end(),
                          [](const RatePoint& p) { return p.ok; });
  return report;
}

CommandReport cmd_ensemble(const ExperimentConfig& cfg) {
  const EnsembleStudy study = run_ensemble_study(cfg);
  const auto dir = prepare_dir(cfg);
  CommandReport report;
  {
    const auto empirical = sample_uniform(study.empirical, cfg.profile_points);
    const auto spectral = sample_uniform(study.spectral, cfg.profile_points);
    CsvWriter csv(dir / "ensemble.csv", "x,empirical,spectral");
    for (std::size_t j = 0; j < cfg.profile_points; ++j) {
      csv.row(static_cast<double>(j) / static_cast<double>(cfg.profile_points), empirical[j],
              spectral[j]);
    }
    report.files.push_back(csv.path());
  }
  Summary& s = report.summary;
  add_config(s, cfg);
  add(s, "particles", cfg.particles);
  add(s, "burn_in", cfg.burn_in);
  add(s, "ensemble_order", cfg.ensemble_order);
  add(s, "coupling_order", cfg.coupling_order ? cfg.coupling_order : cfg.order);
  add(s, "seed", std::to_string(cfg.seed));
  add(s, "l1_distance", study.distance);
  add(s, "checksum", std::to_string(study.checksum));
  report.files.push_back(write_summary(dir / "ensemble_summary.csv", s));
  Summary timings;
  add(timings, "particle_seconds", study.seconds);
  report.files.push_back(write_summary(dir / "ensemble_timings.csv", timings));
  report.ok = true;
  return report;
}

CommandReport cmd_fejer_check(const ExperimentConfig& cfg) {
  const FejerCheck check = run_fejer_check(cfg.seed);
  const auto dir = prepare_dir(cfg);
  CommandReport report;
  {
    CsvWriter csv(dir / "fejer_contraction.csv",
                  "trial,N,l1,projected_l1,w11,projected_w11");
    for (std::size_t t = 0; t < check.trials.size(); ++t) {
      const auto& tr = check.trials[t];
      csv.row(t, tr.order, tr.norm, tr.projected_norm, tr.w11_norm, tr.projected_w11_norm);
    }
    report.files.push_back(csv.path());
  }
  {
    CsvWriter csv(dir / "fejer_rate.csv", "N,error,scale,ratio");
    for (const auto& p : check.rates) csv.row(p.order, p.error, p.scale, p.ratio);
    report.files.push_back(csv.path());
  }
  Summary& s = report.summary;
  add(s, "trials", check.trials.size());
  add(s, "max_excess", check.max_excess);
  add(s, "median_ratio", check.median_ratio);
  add(s, "last_ratio", check.rates.back().ratio);
  add(s, "contraction_ok", std::string(check.contraction_ok ? "true" : "false"));
  add(s, "rate_ok", std::string(check.rate_ok ? "true" : "false"));
  report.files.push_back(write_summary(dir / "fejer_summary.csv", s));
  report.ok = check.contraction_ok && check.rate_ok;
  return report;
}

}  // namespace sctop
