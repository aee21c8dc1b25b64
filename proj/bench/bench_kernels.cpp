// Kernel benchmarks: serial reference vs OpenMP across grid sizes, plus one
// full flow at each backend. The OpenMP paths only engage above the kernel
// size threshold, so the small-n rows measure identical code.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nprg/flow.hpp"
#include "nprg/kernels.hpp"
#include "nprg/model.hpp"

using namespace nprg;

namespace {

std::vector<double> test_field(int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::sin(0.37 * i) + 1e-4 * i * i;
  return v;
}

void bench_curvature(benchmark::State& state, kernels::Backend backend) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<double> v = test_field(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    kernels::curvature(v, 0.01, out, backend);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_flow_rate(benchmark::State& state, kernels::Backend backend) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<double> curv = test_field(n);
  std::vector<double> out(n);
  for (auto _ : state) {
    const double amin = kernels::flow_rate(curv, 2.0, 1.0, out, backend);
    benchmark::DoNotOptimize(amin);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_step(benchmark::State& state, kernels::Backend backend) {
  const int n = static_cast<int>(state.range(0));
  const PotentialGrid grid = bare_potential(1.0, 3.0, n);
  FlowSettings settings;
  settings.backend = backend;
  for (auto _ : state) {
    const PotentialGrid out = step(grid, 50.0, 1e-3, 1.0, settings);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_run_flow(benchmark::State& state, kernels::Backend backend) {
  FlowSettings settings;
  settings.backend = backend;
  settings.t_max = 10.0;  // short flow, enough to engage every kernel
  for (auto _ : state) {
    const FlowOutcome out = run_flow({.lam = 1.0, .etabar = 1.0, .cutbar = 1e4}, settings);
    benchmark::DoNotOptimize(out.lambda_final);
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_curvature, serial, kernels::Backend::serial)
    ->RangeMultiplier(4)
    ->Range(301, 77056);
BENCHMARK_CAPTURE(bench_curvature, openmp, kernels::Backend::openmp)
    ->RangeMultiplier(4)
    ->Range(301, 77056);
BENCHMARK_CAPTURE(bench_flow_rate, serial, kernels::Backend::serial)
    ->RangeMultiplier(4)
    ->Range(301, 77056);
BENCHMARK_CAPTURE(bench_flow_rate, openmp, kernels::Backend::openmp)
    ->RangeMultiplier(4)
    ->Range(301, 77056);
BENCHMARK_CAPTURE(bench_step, serial, kernels::Backend::serial)->Arg(301)->Arg(4801);
BENCHMARK_CAPTURE(bench_step, openmp, kernels::Backend::openmp)->Arg(301)->Arg(4801);
BENCHMARK_CAPTURE(bench_run_flow, serial, kernels::Backend::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_run_flow, openmp, kernels::Backend::openmp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
