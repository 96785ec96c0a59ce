#include "graphost/csbm.hpp"

#include <cmath>
#include <string>

#include "graphost/error.hpp"
#include "graphost/rng.hpp"

namespace graphost {

std::size_t CsbmParams::num_nodes() const noexcept {
  std::size_t n = 0;
  for (const auto s : class_sizes) n += s;
  return n;
}

void CsbmParams::validate() const {
  if (class_sizes.size() < 2) throw Error("CSBM needs at least two classes");
  if (class_means.size() != class_sizes.size()) {
    throw Error("CSBM: " + std::to_string(class_means.size()) + " means for " +
                std::to_string(class_sizes.size()) + " classes");
  }
  for (const auto n : class_sizes) {
    if (n < 1) throw Error("CSBM: every class needs at least one node");
  }
  if (!(intra_prob >= 0.0 && intra_prob <= 1.0) || !(inter_prob >= 0.0 && inter_prob <= 1.0)) {
    throw Error("CSBM: edge probabilities must lie in [0, 1]");
  }
  const std::size_t dim = feature_dim();
  for (const auto& mu : class_means) {
    if (mu.size() != dim) throw Error("CSBM: class means have differing dimensions");
  }
  for (std::size_t a = 0; a < class_means.size(); ++a) {
    for (std::size_t b = a + 1; b < class_means.size(); ++b) {
      if (class_means[a] == class_means[b]) {
        throw Error("CSBM: classes " + std::to_string(a) + " and " + std::to_string(b) +
                    " share a mean");
      }
    }
  }
}

CsbmParams make_binary_csbm(std::size_t n1, std::size_t n2, double intra_prob, double inter_prob,
                            std::size_t feature_dim, double mean_distance) {
  if (feature_dim == 0) throw Error("CSBM: feature_dim must be positive");
  const double c = mean_distance / (2.0 * std::sqrt(static_cast<double>(feature_dim)));
  CsbmParams p;
  p.class_means = {std::vector<double>(feature_dim, c), std::vector<double>(feature_dim, -c)};
  p.class_sizes = {n1, n2};
  p.intra_prob = intra_prob;
  p.inter_prob = inter_prob;
  return p;
}

void to_json(nlohmann::json& j, const CsbmParams& p) {
  j = nlohmann::json{{"class_means", p.class_means},
                     {"class_sizes", p.class_sizes},
                     {"intra_prob", p.intra_prob},
                     {"inter_prob", p.inter_prob}};
}

void from_json(const nlohmann::json& j, CsbmParams& p) {
  j.at("class_means").get_to(p.class_means);
  j.at("class_sizes").get_to(p.class_sizes);
  j.at("intra_prob").get_to(p.intra_prob);
  j.at("inter_prob").get_to(p.inter_prob);
}

std::vector<int> block_labels(const std::vector<std::size_t>& class_sizes) {
  std::vector<int> labels;
  for (std::size_t k = 0; k < class_sizes.size(); ++k) {
    labels.insert(labels.end(), class_sizes[k], static_cast<int>(k));
  }
  return labels;
}

Matrix sample_csbm_features(const CsbmParams& params, std::uint64_t seed) {
  const auto labels = block_labels(params.class_sizes);
  const std::size_t dim = params.feature_dim();
  const CounterRng root = CounterRng::from_seed(seed, "csbm-features");
  Matrix x(labels.size(), dim);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CounterRng rng = root.substream(i);
    const auto& mu = params.class_means[static_cast<std::size_t>(labels[i])];
    auto row = x.row(i);
    for (std::size_t d = 0; d < dim; ++d) row[d] = mu[d] + rng.normal();
  }
  return x;
}

std::vector<Edge> sample_csbm_edges(std::span<const int> labels, double intra_prob,
                                    double inter_prob, std::uint64_t seed) {
  const CounterRng rng = CounterRng::from_seed(seed, "csbm-edges");
  const std::size_t n = labels.size();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double prob = labels[i] == labels[j] ? intra_prob : inter_prob;
      if (rng.uniform_at(i * n + j) < prob) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
      }
    }
  }
  return edges;
}

LabeledGraph generate_csbm_multiclass(const CsbmParams& params, std::uint64_t seed) {
  params.validate();
  auto labels = block_labels(params.class_sizes);
  auto edges = sample_csbm_edges(labels, params.intra_prob, params.inter_prob, seed);
  Matrix features = sample_csbm_features(params, seed);
  const std::size_t n = labels.size();
  return LabeledGraph(n, std::move(edges), std::move(features), std::move(labels),
                      static_cast<int>(params.num_classes()));
}

LabeledGraph generate_csbm(const CsbmParams& params, std::uint64_t seed) {
  if (params.num_classes() != 2) {
    throw Error("generate_csbm expects two classes; use generate_csbm_multiclass");
  }
  return generate_csbm_multiclass(params, seed);
}

LabeledGraph add_feature_noise(const LabeledGraph& graph, double variance, std::uint64_t seed) {
  if (!(variance >= 0.0)) throw Error("feature noise variance must be non-negative");
  const double sd = std::sqrt(variance);
  const CounterRng root = CounterRng::from_seed(seed, "feature-noise");
  Matrix x = graph.features();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    CounterRng rng = root.substream(i);
    for (auto& v : x.row(i)) v += sd * rng.normal();
  }
  return graph.with_features(std::move(x));
}

}  // namespace graphost
