// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sctop/dynamics.hpp"
#include "sctop/kernels.hpp"

using namespace sctop;

namespace {

std::vector<double> map_samples(std::size_t order) {
  return CircleMap::pinched_doubling(0.9).sample(16 * order);
}

template <auto Fn>
void BM_transfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = map_samples(n);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(s, n));
  state.counters["threads"] = kernels::thread_count();
}

template <auto Fn>
void BM_coupling(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto base = map_samples(n);
  std::vector<double> coupled(base), density(base.size(), 1.0);
  for (double& y : coupled) y += 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(Fn(coupled, base, density, n));
}

template <auto Sums, auto Advance>
void BM_particles(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<double> x(m);
  for (double& v : x) v = static_cast<double>(rng() >> 11) * 0x1p-53;
  const CircleMap t = CircleMap::pinched_doubling(0.9);
  std::vector<Complex> field(64);
  for (auto _ : state) {
    Sums(x, field);
    for (auto& c : field) c *= 0.01;
    Advance(x, t, field, 0.025, true);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m));
}

}  // namespace

BENCHMARK(BM_transfer<kernels::serial::transfer_matrix>)->Name("transfer/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_transfer<kernels::parallel::transfer_matrix>)->Name("transfer/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_coupling<kernels::serial::coupling_quadrature>)->Name("coupling/serial")->Arg(32)->Arg(64);
BENCHMARK(BM_coupling<kernels::parallel::coupling_quadrature>)->Name("coupling/parallel")->Arg(32)->Arg(64)->Arg(256);
BENCHMARK(BM_particles<kernels::serial::characteristic_sums, kernels::serial::advance_particles>)
    ->Name("particles/serial")->Arg(100000);
BENCHMARK(BM_particles<kernels::parallel::characteristic_sums, kernels::parallel::advance_particles>)
    ->Name("particles/parallel")->Arg(100000);

BENCHMARK_MAIN();
