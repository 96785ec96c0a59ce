#include <benchmark/benchmark.h>

#include "graphost/csbm.hpp"
#include "graphost/rng.hpp"
#include "graphost/transform.hpp"

namespace {

void BM_FilterEdges(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double p = 16.0 / static_cast<double>(n), q = 4.0 / static_cast<double>(n);
  const auto g = graphost::generate_csbm(graphost::make_binary_csbm(n, n, p, q, 4, 2.0), 2);
  graphost::CounterRng rng(3);
  graphost::EdgeScoreTable scores;
  for (std::size_t i = 0; i < g.num_edges(); ++i) scores.scores.push_back(rng.uniform());
  const auto weighted =
      graphost::build_weighted_graph(g, scores, graphost::TransformMode::kHomophilic);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        graphost::filter_edges(weighted, scores, graphost::TransformMode::kHomophilic, 0.3));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_FilterEdges)->Arg(1000)->Arg(10000);

}  // namespace
