#include <benchmark/benchmark.h>

#include <vector>

#include "pmeta/harness.hpp"
#include "pmeta/nulldist.hpp"
#include "pmeta/rng.hpp"
#include "pmeta/simgen.hpp"

// Parallel kernels against their serial references.  The pairs are
// bitwise-identical by construction, so the only question is speed.

namespace {

using namespace pmeta;

struct TailFixture {
  std::vector<double> weights;
  SignMatrix signs;
  double t = 0.0;
};

const TailFixture& tail_fixture() {
  static const TailFixture fx = [] {
    TailFixture f;
    rng::Pcg32 gen(42, rng::kStreamGeneric);
    for (int k = 0; k < 40; ++k) f.weights.push_back(0.05 + 0.95 * gen.next_double());
    f.signs = make_sign_matrix(40, 0.5, 100000, 7);
    for (const double w : f.weights) f.t += 0.1 * w;
    return f;
  }();
  return fx;
}

void BM_mc_tails_parallel(benchmark::State& state) {
  const TailFixture& fx = tail_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_tails(fx.weights, fx.signs, fx.t));
  }
}
BENCHMARK(BM_mc_tails_parallel);

void BM_mc_tails_serial(benchmark::State& state) {
  const TailFixture& fx = tail_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_tails_serial(fx.weights, fx.signs, fx.t));
  }
}
BENCHMARK(BM_mc_tails_serial);

void BM_resample_values_parallel(benchmark::State& state) {
  const TailFixture& fx = tail_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(resample_values(fx.weights, fx.signs));
  }
}
BENCHMARK(BM_resample_values_parallel);

void BM_resample_values_serial(benchmark::State& state) {
  const TailFixture& fx = tail_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(resample_values_serial(fx.weights, fx.signs));
  }
}
BENCHMARK(BM_resample_values_serial);

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.scenario.kind = ScenarioKind::fixed;
  spec.scenario.rate_ctl = 0.1;
  spec.scenario.rate_trt = 0.2;
  spec.scenario.measure = EffectMeasure{MeasureKind::log_relative_risk};
  spec.scenario.sample_sizes = {100};
  spec.k_studies = 6;
  spec.reps = 4;
  spec.percentiles = {0.5};
  spec.methods = {Method::weighted};
  spec.n_resamples = 2000;
  spec.grid_points = 128;
  spec.base_seed = 3;
  return spec;
}

void BM_run_experiment_parallel(benchmark::State& state) {
  const ExperimentSpec spec = small_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(spec));
  }
}
BENCHMARK(BM_run_experiment_parallel);

void BM_run_experiment_serial(benchmark::State& state) {
  const ExperimentSpec spec = small_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment_serial(spec));
  }
}
BENCHMARK(BM_run_experiment_serial);

}  // namespace

BENCHMARK_MAIN();
