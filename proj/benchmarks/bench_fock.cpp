#include <benchmark/benchmark.h>

#include "qmetro/channels.hpp"
#include "qmetro/fock.hpp"
#include "qmetro/states.hpp"

using namespace qmetro;

static void BM_DisplacementOperator(benchmark::State& state) {
  const int cutoff = static_cast<int>(state.range(0));
  const double beta = 0.2 * cutoff;
  for (auto _ : state) benchmark::DoNotOptimize(displacement_operator(beta, cutoff, 0));
  state.SetComplexityN(cutoff);
}
BENCHMARK(BM_DisplacementOperator)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_CoherentVector(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0));
  const int cutoff = cutoff_for_mean(alpha * alpha);
  for (auto _ : state) benchmark::DoNotOptimize(coherent_vector(alpha, cutoff));
}
BENCHMARK(BM_CoherentVector)->Arg(2)->Arg(8)->Arg(32);

static void BM_LossSingleMode(benchmark::State& state) {
  const DensityOperator rho = DensityOperator::pure(build_state(Cat{static_cast<double>(state.range(0))}));
  for (auto _ : state) benchmark::DoNotOptimize(apply_loss(rho, 0.7));
}
BENCHMARK(BM_LossSingleMode)->Arg(2)->Arg(3)->Arg(5);

static void BM_LossTwoMode(benchmark::State& state) {
  const DensityOperator rho = DensityOperator::pure(build_state(Ecs{static_cast<double>(state.range(0))}));
  for (auto _ : state) benchmark::DoNotOptimize(apply_loss(rho, 0.7));
}
BENCHMARK(BM_LossTwoMode)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
