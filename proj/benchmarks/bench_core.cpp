#include <bdfusion/features.hpp>
#include <bdfusion/kelm.hpp>
#include <bdfusion/preprocess.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace bdfusion;

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

std::vector<int> cyclic_labels(int n, int t) {
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i % t;
  return y;
}

FeatureMatrix named(const Matrix& m) {
  FeatureMatrix f;
  f.values = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j) f.feature_names.push_back("f" + std::to_string(j));
  for (Eigen::Index i = 0; i < m.rows(); ++i) f.sample_ids.push_back("s" + std::to_string(i));
  return f;
}

}  // namespace

static void BM_KelmTrain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix x = gaussian(n, 100, 1);
  const auto y = cyclic_labels(n, 3);
  for (auto _ : state) {
    auto m = kelm::train_kelm(x, y, 3, 100.0, 0.01, kelm::Weighting::class_weighted);
    benchmark::DoNotOptimize(m);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_KelmTrain)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNCubed);

static void BM_KelmPredict(benchmark::State& state) {
  const Matrix x = gaussian(400, 100, 2);
  const auto m = kelm::train_kelm(x, cyclic_labels(400, 3), 3, 100.0, 0.01, kelm::Weighting::unweighted);
  const Matrix probe = gaussian(state.range(0), 100, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kelm::predict_probs(m, probe));
}
BENCHMARK(BM_KelmPredict)->Arg(10)->Arg(100)->Arg(1000);

static void BM_SummarizeBd10(benchmark::State& state) {
  features::LldSeries s;
  s.frames = gaussian(state.range(0), 23, 4);
  for (int j = 0; j < 23; ++j) s.descriptor_names.push_back("d" + std::to_string(j));
  s.clip_id = "clip";
  for (auto _ : state) benchmark::DoNotOptimize(features::summarize_bd10(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SummarizeBd10)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_TreeSelection(benchmark::State& state) {
  const auto f = named(gaussian(120, state.range(0), 5));
  const auto y = cyclic_labels(120, 3);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::tree_feature_select(f, y, {250, 0, 1, 42}));
}
BENCHMARK(BM_TreeSelection)->Arg(50)->Arg(230)->Unit(benchmark::kMillisecond);

static void BM_Pca(benchmark::State& state) {
  const auto f = named(gaussian(120, state.range(0), 6));
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::fit_pca(f, 0.99));
}
BENCHMARK(BM_Pca)->Arg(230)->Arg(760);

BENCHMARK_MAIN();
