#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "sctop/errors.hpp"
#include "sctop/experiment.hpp"

using namespace sctop;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sctop_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> as_map(const CommandReport& r) {
  return {r.summary.begin(), r.summary.end()};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults follow the published setup") {
  const ExperimentConfig cfg;
  CHECK(cfg.a == 0.9);
  CHECK(cfg.delta == 0.45);
  CHECK(cfg.epsilon == 0.025);
  CHECK(cfg.order == 256);
  CHECK(cfg.max_iter == 35);
  CHECK(cfg.reference_order == 1024);
  CHECK(cfg.rate_iterations == 50);
  CHECK(cfg.kernel_scale() == 1.0);
  ExperimentConfig attraction;
  attraction.kernel = "bump-derivative";
  CHECK(attraction.kernel_scale() == 0.2);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("INI round trip") {
  ExperimentConfig cfg;
  cfg.kernel = "bump-derivative";
  cfg.epsilon = 0.0125;
  cfg.order = 48;
  cfg.scheme = Scheme::Sequential;
  cfg.sweep = {2, 8};
  cfg.seed = 77;
  cfg.coupling_form = CouplingForm::Convolved;
  const ExperimentConfig back = parse_config(to_ini(cfg));
  CHECK(back.coupling_form == CouplingForm::Convolved);
  CHECK(to_ini(back) == to_ini(cfg));
  CHECK(back.scheme == Scheme::Sequential);
  CHECK(back.sweep == std::vector<std::size_t>{2, 8});
}

TEST_CASE("diagnostics carry field and line") {
  try {
    parse_config("[map]\na = 0.5\n\n[solver]\norder = many\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "solver.order");
    CHECK(e.line() == 5);
  }
  try {
    parse_config("[solver]\nwidth = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "solver.width");
    CHECK(e.line() == 2);
  }
  try {
    parse_config("[kernel]\ndelta = 0.7\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "kernel.delta");
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_config("[map\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/sctop.ini"), ConfigError);
}

TEST_CASE("overrides") {
  ExperimentConfig cfg;
  apply_override(cfg, "coupling.epsilon=0.01");
  apply_override(cfg, "solver.stop = fixed");
  apply_override(cfg, "rate.sweep=4,16");
  CHECK(cfg.epsilon == 0.01);
  CHECK_FALSE(cfg.stop_on_tolerance);
  CHECK(cfg.sweep == std::vector<std::size_t>{4, 16});
  CHECK_THROWS_AS(apply_override(cfg, "coupling.epsilon"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "solver.scheme=gradient"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "coupling.form=sideways"), ConfigError);
  apply_override(cfg, "coupling.form=convolved");
  apply_override(cfg, "solver.derivative=truncated");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("convergence self-test recovers synthetic rates") {
  ExperimentConfig cfg;
  cfg.self_test = true;
  cfg.output_dir = scratch_dir("selftest");
  const CommandReport r = cmd_convergence(cfg);
  CHECK(r.ok);
  const auto s = as_map(r);
  CHECK(s.at("self_test_ok") == "true");
  CHECK(std::stod(s.at("sequential_slope")) == doctest::Approx(-0.5));
}

TEST_CASE("fixed point with eps = 0 reproduces the uncoupled density") {
  ExperimentConfig cfg;
  cfg.order = 32;
  cfg.epsilon = 0.0;
  cfg.output_dir = scratch_dir("fixed");
  const FixedPointStudy s = run_fixed_point(cfg);
  for (std::size_t j = 0; j < s.grid.size(); ++j) CHECK(std::abs(s.h0[j] - s.h_eps[j]) <= 1e-12);

  const CommandReport first = cmd_fixed_point(cfg);
  CHECK(first.ok);
  const std::string profile = slurp(cfg.output_dir / "profile.csv");
  CHECK(profile.rfind("x,h0,h_eps\n", 0) == 0);
  const std::string summary = slurp(cfg.output_dir / "fixed_point_summary.csv");
  cmd_fixed_point(cfg);
  CHECK(slurp(cfg.output_dir / "profile.csv") == profile);
  CHECK(slurp(cfg.output_dir / "fixed_point_summary.csv") == summary);
}

TEST_CASE("convergence with eps = 0 is flat") {
  ExperimentConfig cfg;
  cfg.order = 32;
  cfg.epsilon = 0.0;
  cfg.max_iter = 5;
  const ConvergenceStudy s = run_convergence(cfg);
  for (std::size_t n = 1; n < s.newton.trace.records.size(); ++n) {
    CHECK(s.newton.trace.records[n].error_l1 <= cfg.tolerance);
    CHECK(s.sequential.trace.records[n].error_l1 <= cfg.tolerance);
  }
}

TEST_CASE("rate study plumbing") {
  ExperimentConfig cfg;
  cfg.kernel = "bump-derivative";
  cfg.sweep = {4, 4};
  cfg.reference_order = 16;
  const RateStudy same = run_rate_n(cfg);
  CHECK(same.points[0].distance == same.points[1].distance);
  CHECK(same.points[0].distance > 0.0);

  ExperimentConfig flat;
  flat.map_family = "doubling";
  flat.epsilon = 0.0;
  flat.sweep = {2, 4, 8};
  flat.reference_order = 32;
  for (const auto& p : run_rate_n(flat).points) CHECK(p.distance <= 1e-12);

  flat.reference_order = 24;
  CHECK_THROWS_AS(run_rate_n(flat), ConfigError);
}

TEST_CASE("ensemble command is deterministic") {
  ExperimentConfig cfg;
  cfg.kernel = "bump-derivative";
  cfg.order = 32;
  cfg.particles = 20000;
  cfg.burn_in = 5;
  cfg.ensemble_order = 16;
  cfg.output_dir = scratch_dir("ensemble");
  const auto a = as_map(cmd_ensemble(cfg));
  const std::string csv = slurp(cfg.output_dir / "ensemble.csv");
  const auto b = as_map(cmd_ensemble(cfg));
  CHECK(a.at("checksum") == b.at("checksum"));
  CHECK(slurp(cfg.output_dir / "ensemble.csv") == csv);
  cfg.seed = 2;
  CHECK(as_map(cmd_ensemble(cfg)).at("checksum") != a.at("checksum"));
}

TEST_CASE("fejer check") {
  const FejerCheck check = run_fejer_check(3, 50);
  CHECK(check.contraction_ok);
  CHECK(check.rate_ok);
  CHECK(check.rates.size() == 7);
  CHECK(check.rates.front().order == 8);
  CHECK(check.rates.back().order == 512);
}

}  // TEST_SUITE
