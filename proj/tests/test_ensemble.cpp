#include <doctest.h>

#include <cmath>
#include <vector>

#include "sctop/ensemble.hpp"
#include "sctop/errors.hpp"
#include "sctop/kernels.hpp"

using namespace sctop;

TEST_SUITE("ensemble") {

TEST_CASE("uniform ensembles are reproducible and in range") {
  const ParticleEnsemble a = make_uniform_ensemble(1000, 99);
  const ParticleEnsemble b = make_uniform_ensemble(1000, 99);
  const ParticleEnsemble c = make_uniform_ensemble(1000, 100);
  CHECK(a.positions == b.positions);
  CHECK(a.positions != c.positions);
  for (double x : a.positions) {
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("without coupling particles follow the map") {
  const CircleMap t = CircleMap::pinched_doubling(0.9);
  const KernelSpec g = make_bump_kernel(0.45, 1.0, false, 16, 0.0);
  const ParticleEnsemble p = make_uniform_ensemble(500, 1);
  const ParticleEnsemble q = step_ensemble(p, t, g);
  CHECK(q.steps == 1);
  for (std::size_t j = 0; j < p.positions.size(); ++j) {
    const double y = t(p.positions[j]);
    CHECK(q.positions[j] == doctest::Approx(y - std::floor(y)).epsilon(1e-15));
  }
}

TEST_CASE("a single particle feels only itself") {
  const CircleMap t = CircleMap::pinched_doubling(0.9);
  const KernelSpec g = make_bump_kernel(0.45, 0.2, true, 64, 0.025);
  ParticleEnsemble p;
  p.positions = {0.3};
  const double x = 0.3;
  const double y = t(x);
  const double expected = y + 0.025 * g(y - x);
  const ParticleEnsemble q = step_ensemble(p, t, g);
  // g enters through its order-64 Fourier series, sup |g - g_64| < 1e-4.
  CHECK(std::abs(q.positions[0] - (expected - std::floor(expected))) < 0.025 * 1e-4);
}

TEST_CASE("a single particle under the convolved form") {
  // x <- R(x) + eps (g o R)(0) = x + alpha + eps g(alpha).
  const CircleMap r = CircleMap::rotation(0.4);
  KernelSpec g = make_bump_kernel(0.45, 1.0, false, 64, 0.025);
  g.form = CouplingForm::Convolved;
  ParticleEnsemble p;
  p.positions = {0.3};
  const ParticleEnsemble q = step_ensemble(p, r, g);
  CHECK(std::abs(q.positions[0] - (0.7 + 0.025 * g(0.4))) < 0.025 * 1e-4);
}

TEST_CASE("stepping is bit-reproducible") {
  const CircleMap t = CircleMap::pinched_doubling(0.9);
  const KernelSpec g = make_bump_kernel(0.45, 0.2, true, 32, 0.025);
  ParticleEnsemble a = make_uniform_ensemble(30000, 5);
  ParticleEnsemble b = make_uniform_ensemble(30000, 5);
  run_ensemble(a, t, g, 10);
  run_ensemble(b, t, g, 10);
  CHECK(a.positions == b.positions);
  CHECK(a.steps == 10);
}

TEST_CASE("empirical density of point masses") {
  ParticleEnsemble at_zero;
  at_zero.positions.assign(10, 0.0);
  const FourierDensity d = empirical_density(at_zero, 8);
  const FejerWeights w(8);
  for (long k = -7; k <= 8; ++k) CHECK(std::abs(d[k] - w(k)) < 1e-15);

  ParticleEnsemble two;
  two.positions = {0.0, 0.5};
  const FourierDensity h = empirical_density(two, 8);
  for (long k = -7; k <= 8; ++k) {
    const double expected = w(k) * (1.0 + (k % 2 == 0 ? 1.0 : -1.0)) / 2.0;
    CHECK(std::abs(h[k] - expected) < 1e-14);
  }
  CHECK_THROWS_AS(empirical_density(ParticleEnsemble{}, 4), InvalidArgument);
}

TEST_CASE("uniform samples have O(1/sqrt(M)) coefficients") {
  for (std::size_t m : {10000u, 1000000u}) {
    const ParticleEnsemble p = make_uniform_ensemble(m, 17);
    std::vector<Complex> c(64);
    kernels::parallel::characteristic_sums(p.positions, c);
    double sum = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) sum += std::norm(c[k]);
    const double rms = std::sqrt(sum / 63.0) * std::sqrt(static_cast<double>(m));
    CHECK(rms > 0.6);
    CHECK(rms < 1.4);
  }
}

TEST_CASE("uniform density survives the coupled doubling map") {
  const CircleMap t = CircleMap::doubling();
  const KernelSpec g = make_bump_kernel(0.45, 0.2, true, 64, 0.025);
  ParticleEnsemble p = make_uniform_ensemble(100000, 3);
  run_ensemble(p, t, g, 50);
  CHECK(l1_distance(empirical_density(p, 64), FourierDensity::uniform(64)) <= 0.05);
}

TEST_CASE("unstable coupling is rejected") {
  const KernelSpec strong = make_bump_kernel(0.45, 1.0, true, 8, 5.0);
  CHECK_THROWS_AS(step_ensemble(make_uniform_ensemble(4, 1), CircleMap::doubling(), strong),
                  InvalidArgument);
}

}  // TEST_SUITE
