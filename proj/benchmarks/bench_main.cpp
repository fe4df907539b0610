#include <benchmark/benchmark.h>

#include <svylasso/glm.hpp>
#include <svylasso/lasso.hpp>
#include <svylasso/sampling.hpp>
#include <svylasso/selective.hpp>
#include <svylasso/truncnorm.hpp>

using namespace svylasso;

namespace {

Dataset sample(Index p, std::uint64_t seed = 3) {
  const Population pop = generate_population(10000, p, 0.5, paper_theta0(p), seed);
  return draw_sample(pop, StratificationScheme::standard(50), seed + 1);
}

void BM_FitPenalized(benchmark::State& state) {
  const Dataset ds = sample(state.range(0));
  const double lam = 0.1 * lambda_max(ds, logit());
  for (auto _ : state) benchmark::DoNotOptimize(fit_penalized(ds, logit(), lam));
}
BENCHMARK(BM_FitPenalized)->Arg(2)->Arg(20)->Arg(100);

void BM_FitPath(benchmark::State& state) {
  const Dataset ds = sample(state.range(0));
  const auto grid = default_lambda_grid(ds, logit());
  for (auto _ : state) benchmark::DoNotOptimize(fit_path(ds, logit(), grid));
}
BENCHMARK(BM_FitPath)->Arg(2)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CrossValidate(benchmark::State& state) {
  const Dataset ds = sample(state.range(0));
  CvSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(cv_select_lambda(ds, logit(), spec));
}
BENCHMARK(BM_CrossValidate)->Arg(2)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SelectionEvent(benchmark::State& state) {
  const Dataset ds = sample(state.range(0));
  const LassoFit fit = fit_penalized(ds, logit(), 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(build_selection_event(ds, logit(), fit));
}
BENCHMARK(BM_SelectionEvent)->Arg(5)->Arg(50);

void BM_TruncnormCdf(benchmark::State& state) {
  const TruncatedNormal tn{0.0, 1.0, -0.5, 40.0};
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncnorm_cdf(tn, x));
    x = x < 30.0 ? x + 0.37 : 0.1;
  }
}
BENCHMARK(BM_TruncnormCdf);

void BM_InvertMean(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(invert_mean(1.3, 1.0, 0.2, 9.0, 0.975));
}
BENCHMARK(BM_InvertMean);

}  // namespace
BENCHMARK_MAIN();
