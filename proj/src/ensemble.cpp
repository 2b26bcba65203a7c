#include "sctop/ensemble.hpp"

#include <random>

#include "sctop/errors.hpp"
#include "sctop/kernels.hpp"

namespace sctop {

ParticleEnsemble make_uniform_ensemble(std::size_t count, std::uint64_t seed) {
  ParticleEnsemble p;
  p.seed = seed;
  p.positions.resize(count);
  std::mt19937_64 rng(seed);
  for (double& x : p.positions) x = static_cast<double>(rng() >> 11) * 0x1p-53;
  return p;
}

ParticleEnsemble step_ensemble(ParticleEnsemble p, const CircleMap& map, const KernelSpec& kernel) {
  if (!kernel.is_stable()) {
    throw InvalidArgument("step_ensemble: eps ||g||_C1 = " +
                          std::to_string(kernel.stability_margin()) + " >= 1");
  }
  if (p.positions.empty()) {
    ++p.steps;
    return p;
  }
  const bool composed = kernel.form == CouplingForm::Composed;
  std::vector<Complex> field(kernel.order());
  if (kernel.epsilon != 0.0) {
    const FourierDensity c = composed ? kernel.coefficients : composed_kernel(map, kernel);
    kernels::parallel::characteristic_sums(p.positions, field);
    for (std::size_t k = 0; k < field.size(); ++k) field[k] *= c[static_cast<Frequency>(k)];
  }
  kernels::parallel::advance_particles(p.positions, map, field, kernel.epsilon, composed);
  ++p.steps;
  return p;
}

void run_ensemble(ParticleEnsemble& p, const CircleMap& map, const KernelSpec& kernel,
                  std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) p = step_ensemble(std::move(p), map, kernel);
}

FourierDensity empirical_density(const ParticleEnsemble& p, std::size_t order) {
  if (p.positions.empty()) throw InvalidArgument("empirical_density: empty ensemble");
  std::vector<Complex> sums(order + 1);
  kernels::parallel::characteristic_sums(p.positions, sums);
  const FejerWeights w(order);
  FourierDensity h(order, true);
  h[0] = 1.0;
  for (std::size_t k = 1; k < order; ++k) {
    const auto f = static_cast<Frequency>(k);
    h[f] = w(f) * sums[k];
    h[-f] = std::conj(h[f]);
  }
  return h;
}

}  // namespace sctop
