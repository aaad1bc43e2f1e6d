// Serial reference versus OpenMP kernels on the canonical fixture.

#include <benchmark/benchmark.h>

#include <vector>

#include "rectconv/ensemble.hpp"
#include "rectconv/kernels.hpp"
#include "rectconv/rng.hpp"

namespace {

using namespace rectconv;

const Spectrum& fixture() {
  static const Spectrum spec = canonical_sqrt_spectrum(500, 1.0);
  return spec;
}

std::vector<double> energies(std::size_t count) {
  std::vector<double> e(count);
  for (std::size_t i = 0; i < count; ++i) e[i] = 0.05 + 1.4 * static_cast<double>(i) / static_cast<double>(count);
  return e;
}

void BM_DensityGridSerial(benchmark::State& state) {
  const auto params = make_params(500, 1000, 0.1);
  const auto e = energies(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(density_grid_serial(fixture(), params, e));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DensityGridParallel(benchmark::State& state) {
  const auto params = make_params(500, 1000, 0.1);
  const auto e = energies(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(density_grid(fixture(), params, e));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<double> trial_top(std::size_t i) {
  static const Spectrum spec = canonical_sqrt_spectrum(150, 1.0);
  const auto params = make_params(150, 300, 0.4);
  return run_trial(spec, params, NoiseKind::gaussian, derive_seed(1, 0, i)).singular_values_sq;
}

void BM_TrialsSerial(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(map_indices_serial(count, trial_top));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrialsParallel(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(map_indices(count, trial_top));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_DensityGridSerial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityGridParallel)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
