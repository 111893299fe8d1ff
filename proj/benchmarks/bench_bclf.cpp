#include <benchmark/benchmark.h>

#include "bclf/dlm.hpp"
#include "bclf/fit.hpp"
#include "bclf/rng.hpp"
#include "bclf/simlab.hpp"
#include "bclf/spectral.hpp"

namespace {

bclf::SeriesMatrix sim1_data(int T) {
  bclf::SimSpec spec;
  spec.gen = bclf::Generator::sim1_case1;
  spec.T = T;
  spec.seed = 1;
  return bclf::generate(spec).x;
}

void BM_DlmFilter(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  bclf::rng::Engine eng(1, 0);
  Eigen::VectorXd y(N), F(N);
  for (int i = 0; i < N; ++i) {
    F[i] = eng.normal();
    y[i] = 0.5 * F[i] + eng.normal();
  }
  const bclf::ActiveMask mask(N, 1);
  const bclf::DlmPriors priors{0, 1, 1, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bclf::dlm_logpredlik(y, F, priors, {0.99, 0.99}, mask));
  }
  state.SetItemsProcessed(state.iterations() * N);
}
BENCHMARK(BM_DlmFilter)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);

// Fit cost should grow linearly in the maximum candidate order.
void BM_FitByOrder(benchmark::State& state) {
  const bclf::SeriesMatrix x = sim1_data(1034);
  bclf::FitConfig cfg;
  cfg.p_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bclf::fit(x, cfg).order);
}
BENCHMARK(BM_FitByOrder)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_FitSim2(benchmark::State& state) {
  bclf::SimSpec spec;
  spec.gen = bclf::Generator::sim2;
  spec.seed = 1;
  const bclf::SeriesMatrix x = bclf::generate(spec).x;
  bclf::FitConfig cfg;
  cfg.p_max = 3;
  for (auto _ : state) benchmark::DoNotOptimize(bclf::fit(x, cfg).order);
}
BENCHMARK(BM_FitSim2)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_SpectralField(benchmark::State& state) {
  bclf::SimSpec spec;
  spec.gen = bclf::Generator::sim1_case1;
  spec.seed = 1;
  const bclf::TvVarModel truth = bclf::generate(spec).truth;
  for (auto _ : state)
    benchmark::DoNotOptimize(bclf::spectral_field(truth, 100).g.size());
  state.SetItemsProcessed(state.iterations() * truth.T * 100);
}
BENCHMARK(BM_SpectralField)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
