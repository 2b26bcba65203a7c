// sctop: command-line driver for the self-consistent transfer operator
// experiments. Run `sctop --help` or `sctop <command> --help`.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "sctop/errors.hpp"
#include "sctop/experiment.hpp"
#include "sctop/kernels.hpp"

namespace {

enum ExitCode { kOk = 0, kIncomplete = 1, kConfig = 2, kSolver = 3 };

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::optional<std::size_t> order;
  std::optional<double> epsilon;
  std::optional<std::string> kernel;
  std::optional<std::string> form;
  std::optional<double> delta;
  std::optional<double> scale;
  std::optional<double> a;
  std::optional<std::string> scheme;
  std::optional<std::size_t> max_iter;
  std::optional<double> tolerance;
  std::optional<std::size_t> particles;
  std::optional<std::size_t> burn_in;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd.add_option("--out", c.out, "Output directory (overrides output.dir)");
  cmd.add_option("--seed", c.seed, "RNG seed (overrides run.seed)");
  cmd.add_option("--set", c.overrides, "Override a config field: section.key=value (repeatable)");
  cmd.add_option("--N", c.order, "Fourier order (solver.order)");
  cmd.add_option("--epsilon", c.epsilon, "Coupling strength (coupling.epsilon)");
  cmd.add_option("--kernel", c.kernel, "bump | bump-derivative (kernel.type)");
  cmd.add_option("--form", c.form, "composed | convolved (coupling.form)");
  cmd.add_option("--delta", c.delta, "Bump half-width (kernel.delta)");
  cmd.add_option("--scale", c.scale, "Kernel scale (kernel.scale)");
  cmd.add_option("--a", c.a, "Pinched doubling parameter (map.a)");
  cmd.add_option("--scheme", c.scheme, "newton | sequential (solver.scheme)");
  cmd.add_option("--max-iter", c.max_iter, "Iteration count (solver.max_iter)");
  cmd.add_option("--tol", c.tolerance, "Residual tolerance (solver.tolerance)");
  cmd.add_option("--particles", c.particles, "Ensemble size (ensemble.particles)");
  cmd.add_option("--burn-in", c.burn_in, "Ensemble burn-in steps (ensemble.burn_in)");
}

sctop::ExperimentConfig resolve(const Common& c) {
  sctop::ExperimentConfig cfg = c.config.empty() ? sctop::ExperimentConfig{}
                                                 : sctop::load_config(c.config);
  auto set = [&cfg](const char* field, const auto& value) {
    if (!value) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*value)>, std::string>) {
      sctop::set_field(cfg, field, *value);
    } else {
      std::ostringstream os;
      os << std::setprecision(17) << *value;
      sctop::set_field(cfg, field, os.str());
    }
  };
  set("solver.order", c.order);
  set("coupling.epsilon", c.epsilon);
  set("kernel.type", c.kernel);
  set("coupling.form", c.form);
  set("kernel.delta", c.delta);
  set("kernel.scale", c.scale);
  set("map.a", c.a);
  set("solver.scheme", c.scheme);
  set("solver.max_iter", c.max_iter);
  set("solver.tolerance", c.tolerance);
  set("ensemble.particles", c.particles);
  set("ensemble.burn_in", c.burn_in);
  set("run.seed", c.seed);
  if (!c.out.empty()) cfg.output_dir = c.out;
  for (const auto& o : c.overrides) sctop::apply_override(cfg, o);
  cfg.validate();
  return cfg;
}

void apply_thread_env() {
  const char* env = std::getenv("SCTOP_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    throw sctop::ConfigError("SCTOP_THREADS must be a positive integer, got '" +
                                 std::string(env) + "'",
                             "SCTOP_THREADS");
  }
  sctop::kernels::set_thread_count(static_cast<int>(n));
}

int report(const sctop::CommandReport& r) {
  for (const auto& [k, v] : r.summary) std::cout << k << ',' << v << '\n';
  for (const auto& f : r.files) std::cerr << "wrote " << f.string() << '\n';
  if (!r.ok) std::cerr << "sctop: requested solves did not reach their goal\n";
  return r.ok ? kOk : kIncomplete;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral fixed points of self-consistent transfer operators"};
  app.require_subcommand(1);

  Common common;
  struct Command {
    const char* name;
    const char* help;
    sctop::CommandReport (*run)(const sctop::ExperimentConfig&);
  };
  const std::vector<Command> commands = {
      {"fixed-point", "Uncoupled and coupled fixed densities on a profile grid",
       sctop::cmd_fixed_point},
      {"convergence", "Sequential vs Newton error traces against a long Newton reference",
       sctop::cmd_convergence},
      {"rate-n", "L1 distance to the reference-order fixed point over an N sweep",
       sctop::cmd_rate_n},
      {"ensemble", "Finite-particle mean-field simulation vs the spectral fixed point",
       sctop::cmd_ensemble},
      {"fejer-check", "Fejer projection contraction and approximation-rate table",
       sctop::cmd_fejer_check},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(*sub, common);
    subs.push_back(sub);
  }
  CLI::App* config_cmd = app.add_subcommand("config", "Print the effective configuration as INI");
  add_common(*config_cmd, common);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_thread_env();
    const sctop::ExperimentConfig cfg = resolve(common);
    if (config_cmd->parsed()) {
      std::cout << sctop::to_ini(cfg);
      return kOk;
    }
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (subs[i]->parsed()) return report(commands[i].run(cfg));
    }
  } catch (const sctop::ConfigError& e) {
    std::cerr << "sctop: " << e.what() << '\n';
    return kConfig;
  } catch (const sctop::InvalidArgument& e) {
    std::cerr << "sctop: invalid argument: " << e.what() << '\n';
    return kConfig;
  } catch (const sctop::SingularSystem& e) {
    std::cerr << "sctop: " << e.what() << '\n';
    return kSolver;
  } catch (const sctop::ConvergenceError& e) {
    std::cerr << "sctop: " << e.what() << '\n';
    return kSolver;
  } catch (const sctop::NonInvertibleCoupling& e) {
    std::cerr << "sctop: " << e.what() << " (min I' = " << e.min_derivative() << ")\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "sctop: " << e.what() << '\n';
    return kSolver;
  }
  return kIncomplete;
}
