#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphost/graph.hpp"

namespace graphost {

/// Contextual stochastic block model: `class_sizes[k]` nodes with features
/// x ~ N(class_means[k], I); each same-class pair is linked with
/// `intra_prob`, each cross-class pair with `inter_prob`.
struct CsbmParams {
  std::vector<std::vector<double>> class_means;
  std::vector<std::size_t> class_sizes;
  double intra_prob = 0.0;
  double inter_prob = 0.0;

  std::size_t num_classes() const noexcept { return class_sizes.size(); }
  std::size_t feature_dim() const noexcept {
    return class_means.empty() ? 0 : class_means.front().size();
  }
  std::size_t num_nodes() const noexcept;
  /// Throws `Error` when an invariant does not hold.
  void validate() const;

  friend bool operator==(const CsbmParams&, const CsbmParams&) = default;
};

/// Two balanced-ish classes with means +-(a / (2 sqrt(l))) * 1, so that
/// ||mu_1 - mu_2|| = mean_distance.
CsbmParams make_binary_csbm(std::size_t n1, std::size_t n2, double intra_prob, double inter_prob,
                            std::size_t feature_dim, double mean_distance);

void to_json(nlohmann::json& j, const CsbmParams& p);
void from_json(const nlohmann::json& j, CsbmParams& p);

/// Labels assigned block-wise: the first n_1 nodes are class 0, and so on.
std::vector<int> block_labels(const std::vector<std::size_t>& class_sizes);

/// Node i draws its features from its own sub-stream, so a node's features
/// do not depend on the sizes of the other blocks or on visiting order.
Matrix sample_csbm_features(const CsbmParams& params, std::uint64_t seed);

/// Every unordered pair {i, j} gets one uniform from the edge stream at a
/// fixed position, so the realised edge set is a pure function of
/// (labels, p, q, seed).
std::vector<Edge> sample_csbm_edges(std::span<const int> labels, double intra_prob,
                                    double inter_prob, std::uint64_t seed);

/// Binary CSBM sample; requires exactly two classes.
LabeledGraph generate_csbm(const CsbmParams& params, std::uint64_t seed);
/// s-class CSBM sample (s >= 2). With s = 2 it returns the same graph as
/// `generate_csbm` for the same seed.
LabeledGraph generate_csbm_multiclass(const CsbmParams& params, std::uint64_t seed);

/// Adds i.i.d. N(0, variance) noise to every feature entry.
LabeledGraph add_feature_noise(const LabeledGraph& graph, double variance, std::uint64_t seed);

}  // namespace graphost
