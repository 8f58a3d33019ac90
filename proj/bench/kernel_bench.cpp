#include <benchmark/benchmark.h>

#include "stylodet/common.hpp"
#include "stylodet/corpus.hpp"
#include "stylodet/embedder.hpp"
#include "stylodet/kernels.hpp"
#include "stylodet/metrics.hpp"
#include "support.hpp"

using namespace stylodet;

namespace {

const std::vector<ScoreRecord>& score_set() {
  static const auto recs = testsupport::noisy_scores(1, 500, 500);
  return recs;
}

const std::vector<CurveMetric>& curve_metrics() {
  static const std::vector<CurveMetric> m = {[](const RocCurve& c) { return pauc(c, 0.01); },
                                             [](const RocCurve& c) { return auc(c); },
                                             [](const RocCurve& c) { return fpr_at_tpr(c); }};
  return m;
}

const std::vector<Episode>& episodes() {
  static const auto eps = [] {
    testsupport::SyntheticOptions opt;
    opt.docs_per_author = 20;
    return build_episodes(testsupport::synthetic_corpus(opt), 5, 1);
  }();
  return eps;
}

std::vector<EmbeddingVector> random_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    out.push_back(normalized(std::move(v)));
  }
  return out;
}

void BM_bootstrap_parallel(benchmark::State& state) {
  BootstrapOptions opts;
  opts.resamples = 200;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_metrics(score_set(), curve_metrics(), opts));
}

void BM_bootstrap_serial(benchmark::State& state) {
  BootstrapOptions opts;
  opts.resamples = 200;
  for (auto _ : state) benchmark::DoNotOptimize(reference::bootstrap_metrics_serial(score_set(), curve_metrics(), opts));
}

void BM_embed_parallel(benchmark::State& state) {
  const StylometricFeaturizer featurizer;
  for (auto _ : state) benchmark::DoNotOptimize(embed_episodes(episodes(), featurizer));
}

void BM_embed_serial(benchmark::State& state) {
  const StylometricFeaturizer featurizer;
  for (auto _ : state) benchmark::DoNotOptimize(reference::embed_episodes_serial(episodes(), featurizer));
}

void BM_cosine_parallel(benchmark::State& state) {
  const auto rows = random_vectors(400, 768, 1), cols = random_vectors(400, 768, 2);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_matrix(rows, cols));
}

void BM_cosine_serial(benchmark::State& state) {
  const auto rows = random_vectors(400, 768, 1), cols = random_vectors(400, 768, 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::cosine_matrix_serial(rows, cols));
}

}  // namespace

BENCHMARK(BM_bootstrap_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_bootstrap_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_embed_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_embed_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cosine_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cosine_serial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
