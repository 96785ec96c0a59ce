#include "graphost/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "graphost/error.hpp"

namespace graphost {

void TransformConfig::validate() const {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error("delta must lie in [0, 1), got " + std::to_string(delta));
  }
}

const char* to_string(TransformMode mode) {
  switch (mode) {
    case TransformMode::kHomophilic: return "homophilic";
    case TransformMode::kHeterophilic: return "heterophilic";
    case TransformMode::kAuto: return "auto";
  }
  return "auto";
}

TransformMode parse_transform_mode(const std::string& s) {
  if (s == "homophilic" || s == "hom") return TransformMode::kHomophilic;
  if (s == "heterophilic" || s == "het") return TransformMode::kHeterophilic;
  if (s == "auto") return TransformMode::kAuto;
  throw Error("unknown transform mode '" + s + "'");
}

void to_json(nlohmann::json& j, const TransformConfig& c) {
  j = nlohmann::json{{"mode", to_string(c.mode)},
                     {"delta", c.delta},
                     {"enable_weighting", c.enable_weighting},
                     {"enable_filtering", c.enable_filtering},
                     {"semantics", c.semantics == FilterSemantics::kTopRatio ? "top_ratio"
                                                                             : "threshold"}};
}

void from_json(const nlohmann::json& j, TransformConfig& c) {
  c.mode = parse_transform_mode(j.value("mode", std::string("auto")));
  c.delta = j.value("delta", 0.3);
  c.enable_weighting = j.value("enable_weighting", true);
  c.enable_filtering = j.value("enable_filtering", true);
  const auto sem = j.value("semantics", std::string("top_ratio"));
  if (sem == "top_ratio") c.semantics = FilterSemantics::kTopRatio;
  else if (sem == "threshold") c.semantics = FilterSemantics::kThreshold;
  else throw Error("unknown filter semantics '" + sem + "'");
  c.validate();
}

EdgeScoreTable heterophily_scores(const EdgeScoreTable& homophily) {
  EdgeScoreTable out;
  out.scores.reserve(homophily.size());
  for (const double s : homophily.scores) out.scores.push_back(1.0 - s);
  return out;
}

namespace {

void require_concrete(TransformMode mode) {
  if (mode == TransformMode::kAuto) {
    throw Error("transform mode 'auto' must be resolved against a training graph first");
  }
}

void require_aligned(const LabeledGraph& graph, const EdgeScoreTable& scores) {
  if (scores.size() != graph.num_edges()) {
    throw Error("score table has " + std::to_string(scores.size()) + " entries for " +
                std::to_string(graph.num_edges()) + " edges");
  }
}

double harmfulness(double s_hom, TransformMode mode) {
  return mode == TransformMode::kHomophilic ? 1.0 - s_hom : s_hom;
}

}  // namespace

WeightedGraph build_weighted_graph(const LabeledGraph& graph, const EdgeScoreTable& homophily,
                                   TransformMode mode) {
  require_concrete(mode);
  require_aligned(graph, homophily);
  std::vector<double> w = mode == TransformMode::kHomophilic
                              ? homophily.scores
                              : heterophily_scores(homophily).scores;
  return WeightedGraph(graph, std::move(w));
}

std::vector<std::size_t> select_filtered_edges(const EdgeScoreTable& homophily,
                                               TransformMode mode, double delta,
                                               FilterSemantics semantics) {
  require_concrete(mode);
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error("delta must lie in [0, 1), got " + std::to_string(delta));
  }
  const std::size_t m = homophily.size();
  std::vector<std::size_t> removed;
  if (semantics == FilterSemantics::kThreshold) {
    for (std::size_t k = 0; k < m; ++k) {
      if (harmfulness(homophily.scores[k], mode) >= delta) removed.push_back(k);
    }
    return removed;
  }
  const auto k = std::min(m, static_cast<std::size_t>(std::ceil(delta * static_cast<double>(m))));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto by_harm = [&](std::size_t a, std::size_t b) {
    const double ha = harmfulness(homophily.scores[a], mode);
    const double hb = harmfulness(homophily.scores[b], mode);
    return ha != hb ? ha > hb : a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    by_harm);
  removed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(removed.begin(), removed.end());
  return removed;
}

namespace {

template <typename Fn>
void for_each_survivor(std::size_t m, const std::vector<std::size_t>& removed, Fn&& fn) {
  std::size_t r = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (r < removed.size() && removed[r] == k) {
      ++r;
      continue;
    }
    fn(k);
  }
}

}  // namespace

WeightedGraph filter_edges(const WeightedGraph& graph, const EdgeScoreTable& homophily,
                           TransformMode mode, double delta, FilterSemantics semantics) {
  const LabeledGraph& g = graph.graph();
  require_aligned(g, homophily);
  const auto removed = select_filtered_edges(homophily, mode, delta, semantics);
  std::vector<Edge> edges;
  std::vector<double> weights;
  for_each_survivor(g.num_edges(), removed, [&](std::size_t k) {
    edges.push_back(g.edges()[k]);
    weights.push_back(graph.weights()[k]);
  });
  // Survivors are already canonical and sorted, so weights stay aligned.
  return WeightedGraph(g.with_edges(std::move(edges)), std::move(weights));
}

LabeledGraph filter_edges(const LabeledGraph& graph, const EdgeScoreTable& homophily,
                          TransformMode mode, double delta, FilterSemantics semantics) {
  require_aligned(graph, homophily);
  const auto removed = select_filtered_edges(homophily, mode, delta, semantics);
  std::vector<Edge> edges;
  for_each_survivor(graph.num_edges(), removed,
                    [&](std::size_t k) { edges.push_back(graph.edges()[k]); });
  return graph.with_edges(std::move(edges));
}

TransformMode resolve_mode(const LabeledGraph& train_graph) {
  if (!train_graph.has_labels()) {
    throw Error("mode 'auto' needs a labelled training graph to measure homophily");
  }
  return edge_homophily_degree(train_graph) >= 0.5 ? TransformMode::kHomophilic
                                                   : TransformMode::kHeterophilic;
}

TransformResult graphost_transform(const LabeledGraph& test_graph, const EdgeScoreTable& scores,
                                   const TransformConfig& config) {
  config.validate();
  require_concrete(config.mode);
  require_aligned(test_graph, scores);
  TransformResult result;
  result.scores = scores;
  result.mode = config.mode;
  WeightedGraph weighted = config.enable_weighting
                               ? build_weighted_graph(test_graph, scores, config.mode)
                               : WeightedGraph::unit(test_graph);
  if (config.enable_filtering) {
    result.graph = filter_edges(weighted, scores, config.mode, config.delta, config.semantics);
    result.removed_edges = test_graph.num_edges() - result.graph.graph().num_edges();
  } else {
    result.graph = std::move(weighted);
  }
  return result;
}

TransformResult graphost_transform(const LabeledGraph& test_graph, const Checkpoint& predictor,
                                   const TransformConfig& config) {
  config.validate();
  require_concrete(config.mode);
  return graphost_transform(test_graph, edge_homophily_scores(predictor, test_graph), config);
}

}  // namespace graphost
