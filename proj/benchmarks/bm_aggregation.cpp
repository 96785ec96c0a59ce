#include <benchmark/benchmark.h>

#include "graphost/csbm.hpp"
#include "graphost/models.hpp"
#include "graphost/nn.hpp"

namespace {

graphost::LabeledGraph sample(std::size_t n_per_class) {
  const double deg = 20.0;
  const double p = 0.8 * deg / static_cast<double>(n_per_class);
  const double q = 0.2 * deg / static_cast<double>(n_per_class);
  return graphost::generate_csbm(graphost::make_binary_csbm(n_per_class, n_per_class, p, q, 32, 2.0),
                                 1);
}

void BM_MeanAggregate(benchmark::State& state) {
  const auto g = sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(graphost::mean_aggregate(g, g.features()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_MeanAggregate)->Arg(500)->Arg(2000)->Arg(8000);

void BM_ClassifierForward(benchmark::State& state) {
  const auto g = sample(static_cast<std::size_t>(state.range(0)));
  const auto ckpt = graphost::initialize_checkpoint(
      graphost::ModelRole::kClassifier,
      graphost::ArchitectureSpec::make(graphost::ModelKind::kGcn, 32, 2), 0);
  for (auto _ : state) benchmark::DoNotOptimize(graphost::classifier_logits(ckpt, g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_nodes()));
}
BENCHMARK(BM_ClassifierForward)->Arg(500)->Arg(2000);

}  // namespace
