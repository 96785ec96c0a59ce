#include <benchmark/benchmark.h>

#include "graphost/csbm.hpp"

namespace {

void BM_GenerateCsbm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto params = graphost::make_binary_csbm(n, n, 0.02, 0.01, 16, 2.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(graphost::generate_csbm(params, seed++));
  // One uniform per unordered node pair.
  const auto pairs = static_cast<std::int64_t>(2 * n * (2 * n - 1) / 2);
  state.SetItemsProcessed(state.iterations() * pairs);
}
BENCHMARK(BM_GenerateCsbm)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
