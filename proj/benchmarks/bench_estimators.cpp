// Fit and predict throughput of the estimators on synthetic reflectances.

#include <benchmark/benchmark.h>

#include "chl/baseline.hpp"
#include "chl/estimators.hpp"
#include "chl/knn.hpp"
#include "chl/synthetic.hpp"

namespace {

chl::SampleTable synthetic_rows(std::size_t n) {
  chl::SyntheticConfig cfg;
  cfg.n = n;
  cfg.noise = 0.02;
  cfg.seed = 11;
  return chl::generate_synthetic(cfg);
}

chl::EstimatorSpec spec_for(chl::ModelKind kind) {
  chl::EstimatorSpec s = chl::EstimatorSpec::defaults(kind);
  s.ensemble.n_estimators = 20;
  return s;
}

void BM_Fit(benchmark::State& state, chl::ModelKind kind) {
  const chl::SampleTable train = synthetic_rows(static_cast<std::size_t>(state.range(0)));
  const chl::EstimatorSpec spec = spec_for(kind);
  for (auto _ : state) {
    chl::FittedModel m = chl::fit(spec, train, {1});
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Predict(benchmark::State& state, chl::ModelKind kind) {
  const chl::SampleTable train = synthetic_rows(static_cast<std::size_t>(state.range(0)));
  const chl::SampleTable query = synthetic_rows(1000);
  const chl::FittedModel m = chl::fit(spec_for(kind), train, {1});
  for (auto _ : state) {
    for (const chl::Sample& s : query.rows) benchmark::DoNotOptimize(chl::predict_one(m, s));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}

void BM_Baseline(benchmark::State& state) {
  const chl::SampleTable rows = synthetic_rows(10000);
  const chl::BandRatioCoeffs coeffs = chl::BandRatioCoeffs::canonical();
  for (auto _ : state) {
    for (const chl::Sample& s : rows.rows) benchmark::DoNotOptimize(chl::band_ratio_chl(s.rrs, coeffs));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}

void BM_KdTreeQuery(benchmark::State& state) {
  const chl::SampleTable rows = synthetic_rows(static_cast<std::size_t>(state.range(0)));
  std::vector<chl::Reflectances> pts;
  for (const chl::Sample& s : rows.rows) pts.push_back(s.rrs);
  const chl::KdTree tree(pts);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.nearest(pts[i++ % pts.size()], 5));
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Fit, linear, chl::ModelKind::linear)->Arg(10000);
BENCHMARK_CAPTURE(BM_Fit, tree, chl::ModelKind::tree)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_Fit, forest, chl::ModelKind::forest)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_Fit, extra_trees, chl::ModelKind::extra_trees)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_Fit, svr, chl::ModelKind::svr)->Arg(1000)->Arg(2000);
BENCHMARK_CAPTURE(BM_Fit, knn, chl::ModelKind::knn)->Arg(10000);
BENCHMARK_CAPTURE(BM_Predict, forest, chl::ModelKind::forest)->Arg(10000);
BENCHMARK_CAPTURE(BM_Predict, svr, chl::ModelKind::svr)->Arg(2000);
BENCHMARK_CAPTURE(BM_Predict, knn, chl::ModelKind::knn)->Arg(10000);
BENCHMARK(BM_Baseline);
BENCHMARK(BM_KdTreeQuery)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
