#include "graphost/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include "graphost/error.hpp"
#include "graphost/rng.hpp"

namespace graphost {

std::vector<Edge> canonicalize(std::vector<Edge> edges, bool directed) {
  if (!directed) {
    for (auto& e : edges) {
      if (e.u > e.v) std::swap(e.u, e.v);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

LabeledGraph::LabeledGraph(std::size_t num_nodes, std::vector<Edge> edges, Matrix features,
                           std::optional<std::vector<int>> labels, int num_classes,
                           bool directed)
    : num_nodes_(num_nodes),
      edges_(canonicalize(std::move(edges), directed)),
      features_(std::make_shared<const Matrix>(std::move(features))),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      directed_(directed) {
  for (const auto& e : edges_) {
    if (e.u >= num_nodes_ || e.v >= num_nodes_) {
      throw Error("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                  ") references a node outside [0, " + std::to_string(num_nodes_) + ")");
    }
    if (e.u == e.v) throw Error("self-loop at node " + std::to_string(e.u) + " is not allowed");
  }
  if (features_->rows() != num_nodes_) {
    throw Error("feature matrix has " + std::to_string(features_->rows()) + " rows, expected " +
                std::to_string(num_nodes_));
  }
  if (!features_->all_finite()) throw Error("feature matrix contains non-finite values");
  if (num_classes_ < 0) throw Error("num_classes must be non-negative");
  if (labels_) {
    if (labels_->size() != num_nodes_) {
      throw Error("label count " + std::to_string(labels_->size()) + " does not match " +
                  std::to_string(num_nodes_) + " nodes");
    }
    for (std::size_t i = 0; i < labels_->size(); ++i) {
      const int y = (*labels_)[i];
      if (y < 0 || y >= num_classes_) {
        throw Error("label " + std::to_string(y) + " of node " + std::to_string(i) +
                    " outside [0, " + std::to_string(num_classes_) + ")");
      }
    }
  }
}

std::span<const int> LabeledGraph::labels() const {
  if (!labels_) throw Error("graph carries no labels");
  return *labels_;
}

LabeledGraph LabeledGraph::with_edges(std::vector<Edge> edges) const {
  LabeledGraph out = *this;
  out.edges_ = canonicalize(std::move(edges), directed_);
  for (const auto& e : out.edges_) {
    if (e.u >= num_nodes_ || e.v >= num_nodes_ || e.u == e.v) {
      throw Error("with_edges: invalid edge (" + std::to_string(e.u) + ", " +
                  std::to_string(e.v) + ")");
    }
  }
  return out;
}

LabeledGraph LabeledGraph::with_features(Matrix features) const {
  return LabeledGraph(num_nodes_, edges_, std::move(features), labels_, num_classes_, directed_);
}

LabeledGraph LabeledGraph::without_labels() const {
  LabeledGraph out = *this;
  out.labels_.reset();
  return out;
}

bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
  return a.num_nodes_ == b.num_nodes_ && a.directed_ == b.directed_ &&
         a.num_classes_ == b.num_classes_ && a.edges_ == b.edges_ && a.labels_ == b.labels_ &&
         *a.features_ == *b.features_;
}

WeightedGraph::WeightedGraph(LabeledGraph graph, std::vector<double> weights)
    : graph_(std::move(graph)), weights_(std::move(weights)) {
  if (weights_.size() != graph_.num_edges()) {
    throw Error("edge weight count " + std::to_string(weights_.size()) + " does not match " +
                std::to_string(graph_.num_edges()) + " edges");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error("edge weight " + std::to_string(w) + " at index " + std::to_string(i) +
                  " outside [0, 1]");
    }
  }
}

WeightedGraph WeightedGraph::unit(LabeledGraph graph) {
  std::vector<double> w(graph.num_edges(), 1.0);
  return WeightedGraph(std::move(graph), std::move(w));
}

Adjacency Adjacency::build(const LabeledGraph& graph) {
  const std::size_t n = graph.num_nodes();
  const auto& edges = graph.edges();
  Adjacency adj;
  adj.offsets.assign(n + 1, 0);
  for (const auto& e : edges) {
    ++adj.offsets[e.v + 1];
    if (!graph.directed()) ++adj.offsets[e.u + 1];
  }
  std::partial_sum(adj.offsets.begin(), adj.offsets.end(), adj.offsets.begin());
  adj.sources.resize(adj.offsets.back());
  adj.edge_index.resize(adj.offsets.back());

  std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    adj.sources[cursor[e.v]] = e.u;
    adj.edge_index[cursor[e.v]++] = k;
    if (!graph.directed()) {
      adj.sources[cursor[e.u]] = e.v;
      adj.edge_index[cursor[e.u]++] = k;
    }
  }

  // Canonical edges are sorted by (u, v); the fill above therefore leaves the
  // sources of each node in two ascending runs. Sorting per node gives one.
  std::vector<std::pair<NodeId, std::size_t>> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = adj.offsets[i];
    const std::size_t hi = adj.offsets[i + 1];
    scratch.clear();
    for (std::size_t k = lo; k < hi; ++k) scratch.emplace_back(adj.sources[k], adj.edge_index[k]);
    std::sort(scratch.begin(), scratch.end());
    for (std::size_t k = lo; k < hi; ++k) {
      adj.sources[k] = scratch[k - lo].first;
      adj.edge_index[k] = scratch[k - lo].second;
    }
  }
  return adj;
}

double edge_homophily_degree(std::span<const Edge> edges, std::span<const int> labels) {
  if (edges.empty()) throw UndefinedMetricError("edge homophily degree is undefined without edges");
  std::size_t same = 0;
  for (const auto& e : edges) {
    if (labels[e.u] == labels[e.v]) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(edges.size());
}

double edge_homophily_degree(const LabeledGraph& graph) {
  return edge_homophily_degree(graph.edges(), graph.labels());
}

namespace {

// Partial Fisher-Yates: the first `k` entries of the returned permutation are
// a uniform k-subset of [0, n).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, CounterRng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

std::uint64_t pair_key(const Edge& e, std::size_t n) {
  return static_cast<std::uint64_t>(e.u) * n + e.v;
}

}  // namespace

LabeledGraph inject_structural_noise(const LabeledGraph& graph, double noise_ratio,
                                     std::uint64_t seed) {
  if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0)) {
    throw Error("noise_ratio must lie in [0, 1], got " + std::to_string(noise_ratio));
  }
  const auto& edges = graph.edges();
  const std::size_t n = graph.num_nodes();
  const auto target =
      static_cast<std::size_t>(noise_ratio / 2.0 * static_cast<double>(edges.size()));
  if (target == 0) return graph;

  CounterRng rng = CounterRng::from_seed(seed, "structural-noise");
  CounterRng removal = rng.substream(0);
  CounterRng addition = rng.substream(1);

  std::vector<bool> removed(edges.size(), false);
  for (const std::size_t k : sample_indices(edges.size(), target, removal)) removed[k] = true;

  std::unordered_set<std::uint64_t> taken;
  taken.reserve(edges.size() + target);
  for (const auto& e : edges) taken.insert(pair_key(e, n));

  std::vector<Edge> added;
  added.reserve(target);
  const std::size_t max_attempts = 100 * target;
  for (std::size_t attempt = 0; attempt < max_attempts && added.size() < target && n > 1;
       ++attempt) {
    Edge e{static_cast<NodeId>(addition.uniform_index(n)),
           static_cast<NodeId>(addition.uniform_index(n))};
    if (e.u == e.v) continue;
    if (!graph.directed() && e.u > e.v) std::swap(e.u, e.v);
    if (taken.insert(pair_key(e, n)).second) added.push_back(e);
  }
  if (added.size() < target) {
    // Dense graph: enumerate the remaining complement and sample from it.
    std::vector<Edge> pool;
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = graph.directed() ? 0 : u + 1; v < n; ++v) {
        if (u == v) continue;
        const Edge e{u, v};
        if (!taken.contains(pair_key(e, n))) pool.push_back(e);
      }
    }
    const std::size_t need = std::min(target - added.size(), pool.size());
    for (const std::size_t k : sample_indices(pool.size(), need, addition)) {
      added.push_back(pool[k]);
    }
  }

  std::vector<Edge> out;
  out.reserve(edges.size() - target + added.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!removed[k]) out.push_back(edges[k]);
  }
  out.insert(out.end(), added.begin(), added.end());
  return graph.with_edges(std::move(out));
}

LabeledGraph random_edge_drop(const LabeledGraph& graph, std::size_t drop_count,
                              std::uint64_t seed) {
  const auto& edges = graph.edges();
  if (drop_count > edges.size()) {
    throw Error("cannot drop " + std::to_string(drop_count) + " of " +
                std::to_string(edges.size()) + " edges");
  }
  CounterRng rng = CounterRng::from_seed(seed, "random-edge-drop");
  std::vector<bool> dropped(edges.size(), false);
  for (const std::size_t k : sample_indices(edges.size(), drop_count, rng)) dropped[k] = true;
  std::vector<Edge> kept;
  kept.reserve(edges.size() - drop_count);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!dropped[k]) kept.push_back(edges[k]);
  }
  return graph.with_edges(std::move(kept));
}

}  // namespace graphost
