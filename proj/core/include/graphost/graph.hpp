#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "graphost/matrix.hpp"

namespace graphost {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Orients undirected edges as u < v, sorts, and drops duplicates.
/// Directed edges keep their orientation and are only sorted and deduplicated.
/// Idempotent.
std::vector<Edge> canonicalize(std::vector<Edge> edges, bool directed);

/// Node set, canonical edge list, feature matrix, and (optionally) labels.
///
/// Undirected edges are stored once as (u, v) with u < v; neighbourhoods are
/// expanded symmetrically by `Adjacency`. Self-loops are rejected. Instances
/// are immutable; the `with_*` helpers return modified copies that share the
/// feature matrix.
class LabeledGraph {
 public:
  LabeledGraph() = default;
  LabeledGraph(std::size_t num_nodes, std::vector<Edge> edges, Matrix features,
               std::optional<std::vector<int>> labels, int num_classes, bool directed = false);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  const Matrix& features() const noexcept { return *features_; }
  std::size_t feature_dim() const noexcept { return features_->cols(); }

  bool has_labels() const noexcept { return labels_.has_value(); }
  /// Throws `Error` when the graph carries no labels.
  std::span<const int> labels() const;
  int num_classes() const noexcept { return num_classes_; }

  /// Same nodes, features and labels with a different edge set.
  LabeledGraph with_edges(std::vector<Edge> edges) const;
  LabeledGraph with_features(Matrix features) const;
  LabeledGraph without_labels() const;

  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b);

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::shared_ptr<const Matrix> features_ = std::make_shared<const Matrix>();
  std::optional<std::vector<int>> labels_;
  int num_classes_ = 0;
  bool directed_ = false;
};

/// A graph plus one weight in [0, 1] per canonical edge.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(LabeledGraph graph, std::vector<double> weights);
  /// All weights 1.
  static WeightedGraph unit(LabeledGraph graph);

  const LabeledGraph& graph() const noexcept { return graph_; }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  LabeledGraph graph_;
  std::vector<double> weights_;
};

/// Incoming-message adjacency in CSR form. For node i, `sources` lists the
/// nodes that send to i in ascending index order together with the index of
/// the canonical edge that carries the message. Undirected edges appear in
/// both endpoint lists; a directed edge (u, v) sends from u to v.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> sources;
  std::vector<std::size_t> edge_index;

  static Adjacency build(const LabeledGraph& graph);

  std::size_t degree(std::size_t node) const { return offsets[node + 1] - offsets[node]; }
};

/// Fraction of edges whose endpoints share a label. Directed edges are
/// counted once each. Throws `UndefinedMetricError` on an empty edge list.
double edge_homophily_degree(const LabeledGraph& graph);
double edge_homophily_degree(std::span<const Edge> edges, std::span<const int> labels);

/// Removes floor(noise_ratio/2 * |E|) uniformly chosen edges and adds as many
/// uniformly sampled pairs that were absent from the input graph (fewer if the
/// complement is too small).
LabeledGraph inject_structural_noise(const LabeledGraph& graph, double noise_ratio,
                                     std::uint64_t seed);

/// Removes exactly `drop_count` uniformly chosen edges.
LabeledGraph random_edge_drop(const LabeledGraph& graph, std::size_t drop_count,
                              std::uint64_t seed);

}  // namespace graphost
