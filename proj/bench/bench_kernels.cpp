#include "levisqueeze/metrics.hpp"
#include "levisqueeze/montecarlo.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

using namespace levisqueeze;

SystemParams oracle_params() {
  SystemParams p;
  p.nbar = 10.0;
  return p;
}

EnsembleSpec ensemble_spec(long long n_traj) {
  EnsembleSpec spec;
  spec.n_traj = n_traj;
  spec.dt = 1e-4;
  spec.t_end = 0.5;
  spec.checkpoints = 5;
  spec.seed = 7;
  return spec;
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto model = build_full_cs(oracle_params());
  const auto v0 = initial_covariance(model.basis(), 0.0);
  const auto spec = ensemble_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble_serial(model, v0, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EnsembleParallel(benchmark::State& state) {
  const auto model = build_full_cs(oracle_params());
  const auto v0 = initial_covariance(model.basis(), 0.0);
  const auto spec = ensemble_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble(model, v0, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

const SweepAxis kAxis{"alpha", 0.0, 0.4, 64, AxisScale::kLinear};

SystemParams dissipative_params() {
  SystemParams p;
  p.delta = p.omega_x;
  return p;
}

void BM_SweepSerial(benchmark::State& state) {
  const Evaluation eval{EvaluationKind::kSteady, 0.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_serial(kAxis, dissipative_params(), build_bogoliubov_dissipative, eval));
  }
  state.SetItemsProcessed(state.iterations() * kAxis.points);
}

void BM_SweepParallel(benchmark::State& state) {
  const Evaluation eval{EvaluationKind::kSteady, 0.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep(kAxis, dissipative_params(), build_bogoliubov_dissipative, eval));
  }
  state.SetItemsProcessed(state.iterations() * kAxis.points);
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
