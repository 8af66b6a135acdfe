#include <benchmark/benchmark.h>

#include <random>

#include "mlplab/operators.hpp"

namespace {

using namespace mlp;

std::vector<GridFunction> inputs(std::size_t N) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<GridFunction> out;
  for (int i = 0; i < 2; ++i) {
    std::vector<double> s(N);
    for (auto& v : s) v = u(rng);
    out.emplace_back(Box::cube(1, 8.0), N, std::move(s), Extension::periodic());
  }
  return out;
}

const KernelSpec& kernel() {
  static const KernelSpec k = builtin_kernel("tensor-odd-gaussian", {2, 1, {}});
  return k;
}

void BM_GtDirect(benchmark::State& state) {
  const auto f = inputs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gt_field(kernel(), f, 0.5));
}

void BM_GtFast(benchmark::State& state) {
  const auto f = inputs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tensor_fast_gt(kernel(), f, 0.5));
}

void BM_Stack(benchmark::State& state) {
  const auto f = inputs(static_cast<std::size_t>(state.range(0)));
  const auto tg = TGrid::defaults(f[0]);
  for (auto _ : state) benchmark::DoNotOptimize(compute_gt_stack(kernel(), f, tg));
}

void BM_AreaIntegral(benchmark::State& state) {
  const auto f = inputs(static_cast<std::size_t>(state.range(0)));
  const auto stack = compute_gt_stack(kernel(), f, TGrid::defaults(f[0]));
  for (auto _ : state) benchmark::DoNotOptimize(area_integral(kernel(), stack));
}

void BM_GStar(benchmark::State& state) {
  const auto f = inputs(static_cast<std::size_t>(state.range(0)));
  const auto stack = compute_gt_stack(kernel(), f, TGrid::defaults(f[0]));
  for (auto _ : state) benchmark::DoNotOptimize(g_star_lambda(kernel(), stack, 8.0));
}

BENCHMARK(BM_GtDirect)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GtFast)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stack)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AreaIntegral)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GStar)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
