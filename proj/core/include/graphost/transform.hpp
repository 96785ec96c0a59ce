#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphost/graph.hpp"
#include "graphost/models.hpp"

namespace graphost {

/// Regime of the test graph. kAuto is resolved from the training graph by
/// `resolve_mode` before any transform runs.
enum class TransformMode { kHomophilic, kHeterophilic, kAuto };

/// How `delta` selects edges for removal.
///   kTopRatio:  remove the ceil(delta * |E|) most harmful edges.
///   kThreshold: remove every edge whose harmfulness score is >= delta.
enum class FilterSemantics { kTopRatio, kThreshold };

struct TransformConfig {
  TransformMode mode = TransformMode::kAuto;
  double delta = 0.3;
  bool enable_weighting = true;
  bool enable_filtering = true;
  FilterSemantics semantics = FilterSemantics::kTopRatio;

  /// delta must lie in [0, 1).
  void validate() const;

  friend bool operator==(const TransformConfig&, const TransformConfig&) = default;
};

void to_json(nlohmann::json& j, const TransformConfig& c);
void from_json(const nlohmann::json& j, TransformConfig& c);
const char* to_string(TransformMode mode);
TransformMode parse_transform_mode(const std::string& s);

/// 1 - s elementwise.
EdgeScoreTable heterophily_scores(const EdgeScoreTable& homophily);

/// Edge weights s_hom (homophilic mode) or 1 - s_hom (heterophilic mode);
/// nodes and edges unchanged.
WeightedGraph build_weighted_graph(const LabeledGraph& graph, const EdgeScoreTable& homophily,
                                   TransformMode mode);

/// Indices (into the canonical edge list) of the edges to remove, ascending.
/// Harmfulness is s_het in homophilic mode and s_hom in heterophilic mode;
/// under kTopRatio ties are broken by ascending edge index.
std::vector<std::size_t> select_filtered_edges(const EdgeScoreTable& homophily,
                                               TransformMode mode, double delta,
                                               FilterSemantics semantics = FilterSemantics::kTopRatio);

/// Drops the selected edges; survivors keep their weights, nodes and
/// features are untouched.
WeightedGraph filter_edges(const WeightedGraph& graph, const EdgeScoreTable& homophily,
                           TransformMode mode, double delta,
                           FilterSemantics semantics = FilterSemantics::kTopRatio);
LabeledGraph filter_edges(const LabeledGraph& graph, const EdgeScoreTable& homophily,
                          TransformMode mode, double delta,
                          FilterSemantics semantics = FilterSemantics::kTopRatio);

/// Homophilic iff the training graph's edge homophily degree is >= 0.5.
TransformMode resolve_mode(const LabeledGraph& train_graph);

struct TransformResult {
  WeightedGraph graph;
  EdgeScoreTable scores;  // s_hom on the input edges
  TransformMode mode = TransformMode::kHomophilic;
  std::size_t removed_edges = 0;
};

/// Scores every test edge with the predictor, reweights (if enabled) and
/// filters (if enabled). Label-free; `config.mode` must not be kAuto.
TransformResult graphost_transform(const LabeledGraph& test_graph, const Checkpoint& predictor,
                                   const TransformConfig& config);
/// Same, from precomputed scores.
TransformResult graphost_transform(const LabeledGraph& test_graph, const EdgeScoreTable& scores,
                                   const TransformConfig& config);

}  // namespace graphost
