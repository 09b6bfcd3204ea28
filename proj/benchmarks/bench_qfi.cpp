#include <benchmark/benchmark.h>

#include "qmetro/precision.hpp"

using namespace qmetro;

static void BM_LossyQfiCat(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lossy_qfi(Cat{3.0}, 0.6));
}
BENCHMARK(BM_LossyQfiCat);

static void BM_LossyQfiEcs(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lossy_qfi(Ecs{3.0}, 0.6));
}
BENCHMARK(BM_LossyQfiEcs)->Unit(benchmark::kMillisecond);

static void BM_LossyQfiNoon(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lossy_qfi(Noon{n}, 0.6));
}
BENCHMARK(BM_LossyQfiNoon)->Arg(4)->Arg(9)->Arg(25);

static void BM_CatBasisQfi(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ucs_lossy_qfi(0.5, 4.45, 0.6));
}
BENCHMARK(BM_CatBasisQfi);

static void BM_OptimizeUcs(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(optimize_ucs_a(4.45, 0.6, 400.0));
}
BENCHMARK(BM_OptimizeUcs)->Unit(benchmark::kMicrosecond);

static void BM_ChopOptimize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(chop_optimize(0.6, 400.0));
}
BENCHMARK(BM_ChopOptimize)->Unit(benchmark::kMillisecond);
