#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "sctop/dynamics.hpp"
#include "sctop/errors.hpp"
#include "sctop/operator.hpp"

using namespace sctop;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("operator") {

TEST_CASE("doubling map is a Fejer-weighted frequency doubling") {
  for (std::size_t n = 1; n <= 8; ++n) {
    const OperatorMatrix l = assemble_transfer(CircleMap::doubling().sample(16 * n), n);
    const FejerWeights w(n);
    const long top = static_cast<long>(n);
    for (long k = -top + 1; k <= top; ++k) {
      for (long i = -top + 1; i <= top; ++i) {
        const double expected = i == 2 * k ? w(k) : 0.0;
        CHECK(std::abs(l(k, i) - expected) < 1e-10);
      }
    }
  }
}

TEST_CASE("rotation is diagonal") {
  const std::size_t n = 6;
  const OperatorMatrix l = assemble_transfer(CircleMap::rotation(0.3).sample(16 * n), n);
  const FejerWeights w(n);
  for (long k = -5; k <= 6; ++k) {
    for (long i = -5; i <= 6; ++i) {
      const Complex expected = i == k ? w(k) * std::polar(1.0, -2.0 * kPi * k * 0.3) : Complex{};
      CHECK(std::abs(l(k, i) - expected) < 1e-10);
    }
  }
}

TEST_CASE("row zero is the unit row and mass is preserved") {
  const OperatorMatrix l = assemble_transfer(CircleMap::pinched_doubling(0.9).sample(16 * 10), 10);
  for (long i = -9; i <= 10; ++i) CHECK(l(0, i) == (i == 0 ? Complex(1.0) : Complex{}));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  FourierDensity h = FourierDensity::uniform(10);
  for (long k = 1; k < 10; ++k) {
    h[k] = Complex(normal(rng), normal(rng)) * 0.1;
    h[-k] = std::conj(h[k]);
  }
  CHECK(apply_operator(l, h)[0] == Complex(1.0, 0.0));
}

TEST_CASE("apply_operator on the doubling map") {
  const OperatorMatrix l = assemble_transfer(CircleMap::doubling().sample(64), 4);
  const FourierDensity e0 = apply_operator(l, FourierDensity::uniform(4));
  CHECK(max_coefficient_distance(e0, FourierDensity::uniform(4)) < 1e-15);

  FourierDensity h = FourierDensity::uniform(4);
  h[1] = h[-1] = 0.5;
  const FourierDensity out = apply_operator(l, h);
  CHECK(max_coefficient_distance(out, FourierDensity::uniform(4)) < 1e-12);
  CHECK_THROWS_AS(apply_operator(l, FourierDensity(5)), InvalidArgument);
}

TEST_CASE("duality pairing against direct quadrature") {
  const std::size_t n = 16;
  const CircleMap t = CircleMap::pinched_doubling(0.6);
  const OperatorMatrix l = assemble_transfer(t.sample(16 * n), n);
  FourierDensity h = FourierDensity::uniform(n);
  h[2] = Complex(0.1, -0.2);
  h[-2] = std::conj(h[2]);
  h[7] = Complex(0.05, 0.03);
  h[-7] = std::conj(h[7]);
  const FourierDensity lh = apply_operator(l, h);
  const FejerWeights w(n);
  const std::size_t m = 4096;
  for (long k = -15; k <= 16; ++k) {
    Complex pairing{};
    for (std::size_t j = 0; j < m; ++j) {
      const double x = static_cast<double>(j) / m;
      pairing += h.evaluate(x) * std::polar(1.0, -2.0 * kPi * k * t(x));
    }
    CHECK(std::abs(lh[k] - w(k) * pairing / static_cast<double>(m)) < 1e-8);
  }
}

TEST_CASE("leading fixed density") {
  const OperatorMatrix d = assemble_transfer(CircleMap::doubling().sample(16 * 8), 8);
  CHECK(max_coefficient_distance(leading_fixed_density(d), FourierDensity::uniform(8)) < 1e-13);

  const std::size_t n = 256;
  const CircleMap t = CircleMap::pinched_doubling(0.9);
  const OperatorMatrix l = assemble_transfer(t.sample(16 * n), n);
  const FourierDensity h = leading_fixed_density(l);
  CHECK(h[0] == Complex(1.0, 0.0));
  CHECK(max_coefficient_distance(apply_operator(l, h), h) <= 1e-13);
  const auto values = sample_uniform(h, 16 * n);
  const auto peak = std::max_element(values.begin(), values.end()) - values.begin();
  CHECK(peak == 0);
  CHECK(*std::min_element(values.begin(), values.end()) >= -1e-6);

  FixedDensityOptions tight;
  tight.max_iterations = 2;
  tight.tolerance = 1e-15;
  CHECK_THROWS_AS(leading_fixed_density(l, tight), ConvergenceError);
}

TEST_CASE("operator dump round trip") {
  const OperatorMatrix l = assemble_transfer(CircleMap::pinched_doubling(0.9).sample(16 * 5), 5);
  const auto path = std::filesystem::temp_directory_path() / "sctop_operator_dump.bin";
  write_operator(l, path);
  CHECK(std::filesystem::file_size(path) == 16 + 10 * 10 * 16);
  const OperatorMatrix back = read_operator(path);
  CHECK(back.order == 5);
  CHECK(back.entries == l.entries);
  {
    std::ofstream junk(path, std::ios::binary);
    junk << "not a matrix";
  }
  CHECK_THROWS_AS(read_operator(path), InvalidArgument);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
