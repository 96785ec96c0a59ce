#include <benchmark/benchmark.h>

#include "graphost/metrics.hpp"
#include "graphost/rng.hpp"

namespace {

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  graphost::CounterRng rng(5);
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(rng.uniform_index(2));
    scores[i] = 0.3 * labels[i] + rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(graphost::roc_auc(scores, labels));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

}  // namespace
