#pragma once

// Finite-particle mean-field simulation. Each step moves every particle by
//
//     x_i <- T(x_i) + (eps / M) sum_j g(T(x_i) - x_j)   (mod 1),
//
// with the sum over the pre-step positions evaluated through the Fourier
// coefficients of g and the characteristic sums (1/M) sum_j e_{-k}(x_j).
// A kernel with the convolved coupling form moves particles by
// T(x_i) + (eps / M) sum_j (g o T)(x_i - x_j) instead.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sctop/dynamics.hpp"
#include "sctop/fourier.hpp"

namespace sctop {

struct ParticleEnsemble {
  std::vector<double> positions;  // in [0, 1)
  std::uint64_t seed = 0;
  std::size_t steps = 0;
};

/// count i.i.d. uniform positions from std::mt19937_64 seeded with seed.
/// Uniform values are the top 53 bits of each draw scaled by 2^-53.
ParticleEnsemble make_uniform_ensemble(std::size_t count, std::uint64_t seed);

/// One mean-field step. Coupling frequencies |k| <= kernel.order() - 1 are used.
/// Throws InvalidArgument if eps ||g||_{C^1} >= 1.
ParticleEnsemble step_ensemble(ParticleEnsemble p, const CircleMap& map, const KernelSpec& kernel);

/// Runs steps in place.
void run_ensemble(ParticleEnsemble& p, const CircleMap& map, const KernelSpec& kernel,
                  std::size_t steps);

/// h^(k) = w(k) (1/M) sum_j e_{-k}(x_j), flagged real; h^(0) = 1.
/// Throws InvalidArgument for an empty ensemble.
FourierDensity empirical_density(const ParticleEnsemble& p, std::size_t order);

}  // namespace sctop
