#include <benchmark/benchmark.h>

#include "qmetro/measurement.hpp"

using namespace qmetro;

static void BM_CountingAnalytic(benchmark::State& state) {
  const StateSpec spec = Ucs{0.5, 8.0};
  const double beta = static_cast<double>(state.range(0));
  const CountWindow window = count_window(spec, 0.8, beta);
  for (auto _ : state) benchmark::DoNotOptimize(counting_distribution(spec, 0.8, 1.2, beta, window));
  state.counters["counts"] = static_cast<double>(window.size());
}
BENCHMARK(BM_CountingAnalytic)->Arg(4)->Arg(16)->Arg(64);

static void BM_CountingNumeric(benchmark::State& state) {
  const StateSpec spec = Ucs{0.5, 8.0};
  const double beta = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(outcome_distribution(spec, 0.8, 1.2, beta));
}
BENCHMARK(BM_CountingNumeric)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_ClassicalFisher(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(classical_fisher(Cat{4.0}, 0.9, 1.4, 16.0));
}
BENCHMARK(BM_ClassicalFisher);

static void BM_BayesianTrial(benchmark::State& state) {
  MeasurementConfig config;
  config.spec = Cat{4.0};
  config.eta = 0.9;
  config.beta = 16.0;
  config.m = state.range(0);
  const BayesianExperiment experiment(config);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(experiment.run(experiment.phi_opt(), ++seed));
}
BENCHMARK(BM_BayesianTrial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
