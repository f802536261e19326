// Serial reference vs OpenMP local moments, plus Dantzig LP and batch
// prediction timings. Thread count follows OMP_NUM_THREADS / DLPD_THREADS.

#include "dlpd/classifier.hpp"
#include "dlpd/dantzig.hpp"
#include "dlpd/local_moments.hpp"
#include "dlpd/local_moments_reference.hpp"
#include "dlpd/simulation.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cstdlib>

using namespace dlpd;

namespace {

DataSet bench_data(Index n_per_class, Index p) {
  ModelSpec spec;
  spec.id = ModelId::M2;
  spec.p = p;
  spec.n1 = n_per_class;
  spec.n2 = n_per_class;
  spec.seed = RngSeed{42};
  return sample_dataset(spec);
}

void moments_args(benchmark::internal::Benchmark* b) {
  for (int n : {100, 1000})
    for (int p : {50, 200}) b->Args({n, p});
}

void BM_MomentsReference(benchmark::State& state) {
  const DataSet data = bench_data(state.range(0), state.range(1));
  const Bandwidth h = rate_bandwidth(data.count(ClassLabel::X), data.feature_dim(), 1);
  const auto k = KernelSpec::epanechnikov();
  for (auto _ : state) {
    LocalMoments m = reference::pooled_local_moments(data, CovariatePoint{0.5}, h, h, k);
    benchmark::DoNotOptimize(m.sigma_hat.data());
  }
}
BENCHMARK(BM_MomentsReference)->Apply(moments_args)->Unit(benchmark::kMicrosecond);

void BM_MomentsOpenMP(benchmark::State& state) {
  const DataSet data = bench_data(state.range(0), state.range(1));
  const Bandwidth h = rate_bandwidth(data.count(ClassLabel::X), data.feature_dim(), 1);
  const auto k = KernelSpec::epanechnikov();
  for (auto _ : state) {
    LocalMoments m = pooled_local_moments(data, CovariatePoint{0.5}, h, h, k);
    benchmark::DoNotOptimize(m.sigma_hat.data());
  }
  state.counters["threads"] = omp_get_max_threads();
}
BENCHMARK(BM_MomentsOpenMP)->Apply(moments_args)->Unit(benchmark::kMicrosecond);

void BM_DantzigLp(benchmark::State& state) {
  const DataSet data = bench_data(100, state.range(0));
  const Bandwidth h = rate_bandwidth(100, data.feature_dim(), 1);
  const LocalMoments m = pooled_local_moments(data, CovariatePoint{0.5}, h, h, KernelSpec::epanechnikov());
  const double lambda = 0.5 * m.delta_hat().cwiseAbs().maxCoeff();
  Index pivots = 0;
  for (auto _ : state) {
    const DantzigSolution s = solve_dantzig({m.sigma_hat, m.delta_hat(), lambda});
    pivots = s.iterations;
    benchmark::DoNotOptimize(s.beta_hat.data());
  }
  state.counters["pivots"] = static_cast<double>(pivots);
}
BENCHMARK(BM_DantzigLp)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PredictBatch(benchmark::State& state) {
  const DataSet train = bench_data(100, 50);
  ModelSpec spec;
  spec.id = ModelId::M2;
  spec.p = 50;
  spec.seed = RngSeed{42};
  const DataSet test = sample_test_dataset(spec, 50, 50);
  const Bandwidth h = rate_bandwidth(100, 50, 1);
  for (auto _ : state) {
    // Fresh model each time so the local-fit cache does not hide the work.
    const DlpdModel model(train, h, h, KernelSpec::epanechnikov(), 0.3);
    auto pred = predict_batch(model, test.features(), test.covariates());
    benchmark::DoNotOptimize(pred.data());
  }
}
BENCHMARK(BM_PredictBatch)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("DLPD_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) omp_set_num_threads(t);
  }
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
