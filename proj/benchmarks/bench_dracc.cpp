#include <benchmark/benchmark.h>

#include "dracc/dracc.hpp"

using namespace dracc;

namespace {

sim::SimulatedSample sample_of(std::size_t n) {
  return sim::generate({n, sim::Spec::Correct, sim::Spec::Correct, 12345});
}

void BM_ComputeBundle(benchmark::State& state) {
  const auto s = sample_of(static_cast<std::size_t>(state.range(0)));
  const Vector mu = sim::outcome_mean(s.latent);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_bundle(mu, s.true_propensity, s.response, s.outcome));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeBundle)->Arg(1000)->Arg(100000);

void BM_SampleW(benchmark::State& state) {
  CovMatrix3 sigma;
  sigma.sigma << 4, 1, 1.5, 1, 2, 1, 1.5, 1, 3;
  Rng rng = make_rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_W(sigma, static_cast<std::size_t>(state.range(0)), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleW)->Arg(10000)->Arg(1000000);

void BM_AccInterval(benchmark::State& state) {
  CovMatrix3 sigma;
  sigma.sigma << 4, 1, 1.5, 1, 2, 1, 1.5, 1, 3;
  const EstimateBundle b = combine(210.0, 211.0, 210.4, 1000);
  Rng rng = make_rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(acc_interval(b, sigma, kDefaultBootstrapDraws, 0.05, rng));
}
BENCHMARK(BM_AccInterval);

void BM_FitLogistic(benchmark::State& state) {
  const auto s = sample_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_logistic(s.observed, s.response));
}
BENCHMARK(BM_FitLogistic)->Arg(1000)->Arg(100000);

void BM_FitOls(benchmark::State& state) {
  const auto s = sample_of(static_cast<std::size_t>(state.range(0)));
  const Matrix x = select_rows(s.observed, s.response);
  Vector y(x.rows());
  for (std::size_t i = 0, k = 0; i < s.n(); ++i) {
    if (s.response[i]) y(static_cast<Eigen::Index>(k++)) = s.outcome.at(i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_ols(x, y));
}
BENCHMARK(BM_FitOls)->Arg(1000)->Arg(100000);

// One replication of the study: generate, then fit and infer under all four scenarios.
void BM_Replication(benchmark::State& state) {
  StudyConfig config;
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const auto seed = sample_seed(config.master_seed, n, rep++);
    const auto s = sim::generate({n, sim::Spec::Correct, sim::Spec::Correct, seed});
    for (const auto& scenario : all_scenarios()) {
      Rng rng = make_rng(bootstrap_seed(seed, scenario));
      benchmark::DoNotOptimize(fit_scenario(s, scenario, config, rng));
    }
  }
}
BENCHMARK(BM_Replication)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
