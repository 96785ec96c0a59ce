#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "graphost/error.hpp"
#include "graphost/graph.hpp"
#include "graphost/graph_io.hpp"
#include "graphost/rng.hpp"
#include "oracles.hpp"

using namespace graphost;

namespace {

LabeledGraph make_graph(std::size_t n, std::vector<Edge> edges, std::vector<int> labels,
                        int num_classes = 2) {
  return LabeledGraph(n, std::move(edges), Matrix(n, 2, 1.0), std::move(labels), num_classes);
}

LabeledGraph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) edges.push_back({u, v});
  }
  return make_graph(n, edges, std::vector<int>(n, 0), 1);
}

// 100 edges on 60 nodes, leaving plenty of non-edges.
LabeledGraph hundred_edges() {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 50; ++u) {
    edges.push_back({u, static_cast<NodeId>(u + 1)});
    edges.push_back({u, static_cast<NodeId>(u + 7)});
  }
  std::vector<int> labels(60);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2;
  return make_graph(60, edges, labels);
}

bool has_self_loops_or_duplicates(const LabeledGraph& g) {
  std::set<Edge> seen;
  for (const auto& e : g.edges()) {
    if (e.u == e.v || !seen.insert(e).second) return true;
  }
  return false;
}

}  // namespace

TEST(Canonicalize, OrdersAndDeduplicatesUndirectedEdges) {
  const auto out = canonicalize({{2, 1}, {0, 3}, {1, 2}, {3, 0}}, false);
  EXPECT_EQ(out, (std::vector<Edge>{{0, 3}, {1, 2}}));
}

TEST(Canonicalize, KeepsDirectionForDirectedEdges) {
  const auto out = canonicalize({{2, 1}, {1, 2}, {2, 1}}, true);
  EXPECT_EQ(out, (std::vector<Edge>{{1, 2}, {2, 1}}));
}

TEST(Canonicalize, IsIdempotent) {
  CounterRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Edge> edges;
    for (int k = 0; k < 40; ++k) {
      edges.push_back({static_cast<NodeId>(rng.uniform_index(15)),
                       static_cast<NodeId>(rng.uniform_index(15))});
    }
    for (const bool directed : {false, true}) {
      const auto once = canonicalize(edges, directed);
      EXPECT_EQ(canonicalize(once, directed), once);
    }
  }
}

TEST(LabeledGraph, RejectsInvariantViolations) {
  EXPECT_THROW(make_graph(3, {{0, 3}}, {0, 0, 0}), Error);
  EXPECT_THROW(make_graph(3, {{1, 1}}, {0, 0, 0}), Error);
  EXPECT_THROW(make_graph(3, {{0, 1}}, {0, 0}), Error);
  EXPECT_THROW(make_graph(3, {{0, 1}}, {0, 2, 0}), Error);
  EXPECT_THROW(LabeledGraph(3, {}, Matrix(2, 2), std::nullopt, 2), Error);
  Matrix bad(3, 1);
  bad(1, 0) = std::nan("");
  EXPECT_THROW(LabeledGraph(3, {}, bad, std::nullopt, 2), Error);
}

TEST(LabeledGraph, LabelsAccessThrowsWhenAbsent) {
  const LabeledGraph g = make_graph(2, {{0, 1}}, {0, 1}).without_labels();
  EXPECT_FALSE(g.has_labels());
  EXPECT_THROW((void)g.labels(), Error);
}

TEST(WeightedGraph, RejectsMisalignedOrOutOfRangeWeights) {
  const LabeledGraph g = make_graph(3, {{0, 1}, {1, 2}}, {0, 0, 1});
  EXPECT_THROW(WeightedGraph(g, {1.0}), Error);
  EXPECT_THROW(WeightedGraph(g, {1.0, 1.5}), Error);
  EXPECT_THROW(WeightedGraph(g, {-0.1, 0.5}), Error);
  EXPECT_NO_THROW(WeightedGraph(g, {0.0, 1.0}));
}

TEST(EdgeHomophilyDegree, AllSameClassIsOne) {
  EXPECT_DOUBLE_EQ(edge_homophily_degree(make_graph(3, {{0, 1}, {1, 2}}, {0, 0, 0})), 1.0);
}

TEST(EdgeHomophilyDegree, TriangleWithOneOddNodeIsOneThird) {
  EXPECT_DOUBLE_EQ(edge_homophily_degree(make_graph(3, {{0, 1}, {0, 2}, {1, 2}}, {0, 0, 1})),
                   1.0 / 3.0);
}

TEST(EdgeHomophilyDegree, EmptyEdgeListIsUndefined) {
  EXPECT_THROW(edge_homophily_degree(make_graph(3, {}, {0, 0, 1})), UndefinedMetricError);
}

TEST(EdgeHomophilyDegree, CountsDirectedEdgesOnce) {
  const LabeledGraph g(3, {{0, 1}, {1, 0}, {1, 2}}, Matrix(3, 1), std::vector<int>{0, 0, 1}, 2,
                       true);
  EXPECT_DOUBLE_EQ(edge_homophily_degree(g), 2.0 / 3.0);
}

TEST(EdgeHomophilyDegree, MatchesCountingOracleOnFixtures) {
  for (const auto& path : oracle::fixture_files()) {
    const LabeledGraph g = load_graph(path);
    const double hd = edge_homophily_degree(g);
    EXPECT_DOUBLE_EQ(hd, oracle::homophily_degree(g.edges(), g.labels())) << path;
    EXPECT_GE(hd, 0.0);
    EXPECT_LE(hd, 1.0);
  }
}

TEST(StructuralNoise, ZeroRatioIsIdentity) {
  const LabeledGraph g = hundred_edges();
  EXPECT_EQ(inject_structural_noise(g, 0.0, 5), g);
}

TEST(StructuralNoise, HalfRatioSwapsQuarterOfEdges) {
  const LabeledGraph g = hundred_edges();
  ASSERT_EQ(g.num_edges(), 100u);
  const LabeledGraph noisy = inject_structural_noise(g, 0.5, 5);
  EXPECT_EQ(noisy.num_edges(), 100u);
  std::vector<Edge> kept;
  std::set_intersection(g.edges().begin(), g.edges().end(), noisy.edges().begin(),
                        noisy.edges().end(), std::back_inserter(kept));
  EXPECT_EQ(kept.size(), 75u);
  EXPECT_FALSE(has_self_loops_or_duplicates(noisy));
  EXPECT_EQ(noisy.features(), g.features());
  EXPECT_EQ(noisy.num_nodes(), g.num_nodes());
}

TEST(StructuralNoise, CompleteGraphAddsOnlyAvailableNonEdges) {
  const LabeledGraph g = complete_graph(8);  // 28 edges
  const LabeledGraph noisy = inject_structural_noise(g, 0.5, 1);
  // floor(0.25 * 28) = 7 removed; no pair was absent before, so none is added.
  EXPECT_EQ(noisy.num_edges(), 21u);
  EXPECT_FALSE(has_self_loops_or_duplicates(noisy));

  // With one absent pair, exactly that pair is added.
  std::vector<Edge> edges = g.edges();
  edges.erase(edges.begin());
  const LabeledGraph almost = g.with_edges(edges);
  const LabeledGraph refilled = inject_structural_noise(almost, 0.1, 2);  // floor(1.35) = 1
  EXPECT_EQ(refilled.num_edges(), almost.num_edges());
  EXPECT_TRUE(std::binary_search(refilled.edges().begin(), refilled.edges().end(), g.edges()[0]));
}

TEST(StructuralNoise, RejectsRatioOutsideUnitInterval) {
  EXPECT_THROW(inject_structural_noise(hundred_edges(), -0.1, 0), Error);
  EXPECT_THROW(inject_structural_noise(hundred_edges(), 1.1, 0), Error);
}

TEST(StructuralNoise, PreservesCountAndIsPureFunctionOfSeed) {
  const LabeledGraph g = hundred_edges();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const double r : {0.1, 0.3, 0.7, 1.0}) {
      const LabeledGraph a = inject_structural_noise(g, r, seed);
      EXPECT_EQ(a.num_edges(), g.num_edges());
      EXPECT_FALSE(has_self_loops_or_duplicates(a));
      EXPECT_EQ(a, inject_structural_noise(g, r, seed));
    }
  }
}

TEST(RandomEdgeDrop, EdgeCases) {
  const LabeledGraph g = hundred_edges();
  EXPECT_EQ(random_edge_drop(g, 0, 3), g);
  EXPECT_EQ(random_edge_drop(g, 100, 3).num_edges(), 0u);
  EXPECT_THROW(random_edge_drop(g, 101, 3), Error);
}

TEST(RandomEdgeDrop, DropsExactCountDeterministically) {
  const LabeledGraph g = hundred_edges();
  const LabeledGraph a = random_edge_drop(g, 30, 9);
  EXPECT_EQ(a.num_edges(), 70u);
  EXPECT_TRUE(std::includes(g.edges().begin(), g.edges().end(), a.edges().begin(),
                            a.edges().end()));
  EXPECT_EQ(a, random_edge_drop(g, 30, 9));
  EXPECT_NE(a, random_edge_drop(g, 30, 10));
}

TEST(Adjacency, ExpandsUndirectedEdgesSymmetrically) {
  const LabeledGraph g = make_graph(4, {{0, 1}, {0, 2}, {2, 3}}, {0, 0, 1, 1});
  const Adjacency adj = Adjacency::build(g);
  EXPECT_EQ(adj.degree(0), 2u);
  EXPECT_EQ(adj.degree(1), 1u);
  EXPECT_EQ(adj.degree(2), 2u);
  EXPECT_EQ(adj.degree(3), 1u);
}
