#include <benchmark/benchmark.h>

#include <numbers>

#include "sgspec/pruefer.hpp"
#include "sgspec/scattering.hpp"
#include "sgspec/spectrum.hpp"

using namespace sgspec;

namespace {

constexpr double pi = std::numbers::pi;

const PotentialProfile& breather() {
  static const auto p = make_breather_with_l1(0.5 * pi, 3.5 * pi);
  return p;
}

void BM_ReducedWronskian(benchmark::State& state) {
  const auto& p = breather();
  const SpectralParameter z(cplx(0.6, 0.9));
  for (auto _ : state) benchmark::DoNotOptimize(reduced_wronskian(z, p));
}
BENCHMARK(BM_ReducedWronskian)->Unit(benchmark::kMicrosecond);

void BM_PrueferFlow(benchmark::State& state) {
  const auto& p = breather();
  for (auto _ : state) benchmark::DoNotOptimize(pruefer_flow(0.7, p));
}
BENCHMARK(BM_PrueferFlow)->Unit(benchmark::kMicrosecond);

void BM_CircleScan(benchmark::State& state) {
  const auto& p = breather();
  CircleScanOptions o;
  o.grid_size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(circle_scan(p, o));
}
BENCHMARK(BM_CircleScan)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SineHalfIntegral(benchmark::State& state) {
  const auto& p = breather();
  for (auto _ : state) benchmark::DoNotOptimize(l1_sine_half(p));
}
BENCHMARK(BM_SineHalfIntegral)->Unit(benchmark::kMicrosecond);

void BM_LocateBuckinghamMiller(benchmark::State& state) {
  const auto p = make_buckingham_miller();
  for (auto _ : state) benchmark::DoNotOptimize(locate_eigenvalues(SearchRegion{}, p));
}
BENCHMARK(BM_LocateBuckinghamMiller)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_LocateBreather(benchmark::State& state) {
  const auto& p = breather();
  SearchOptions o;
  o.use_symmetry = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(locate_eigenvalues(SearchRegion{}, p, o));
}
BENCHMARK(BM_LocateBreather)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
