#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "graphost/graph.hpp"
#include "graphost/matrix.hpp"

namespace graphost {

enum class Activation { kIdentity, kRelu };

/// Neighbourhood normalisation used by the practical GCN layers.
///   kWeightedMean: h_i = sum_j w_ij x_j / sum_j w_ij over N(i) + {i}
///   kSum:          h_i = sum_j w_ij x_j            over N(i) + {i}
/// The self-loop always carries weight 1.
enum class Aggregation { kWeightedMean, kSum };

/// Probability clamp used by every log-loss.
inline constexpr double kProbabilityEpsilon = 1e-7;

double sigmoid(double x) noexcept;

/// Row-wise softmax. Rejects non-finite input.
Matrix softmax_rows(const Matrix& logits);

/// Cosine similarity; 0 when either vector is zero. Rejects non-finite input.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// Accumulates upstream * d cos(u, v) / du into `du` and likewise for `dv`.
/// Zero vectors receive no gradient.
void cosine_similarity_backward(std::span<const double> u, std::span<const double> v,
                                double upstream, std::span<double> du, std::span<double> dv);

/// Strict-neighbour mean aggregation (no self-loop):
///   h_i = sum_{j in N(i)} w_ij x_j / sum_{j in N(i)} w_ij
/// with w_ij = 1 when `edge_weights` is empty. A node whose incident weight is
/// zero (isolated, or every incident weight 0) keeps its own feature row.
Matrix mean_aggregate(const LabeledGraph& graph, const Matrix& features,
                      std::span<const double> edge_weights = {});

/// Sparse propagation operator P with self-loops, built once per
/// (graph, weights) and reused by every layer of a forward/backward pass.
/// Row i holds its entries in ascending column order.
class Propagation {
 public:
  static Propagation build(const LabeledGraph& graph, std::span<const double> edge_weights,
                           Aggregation aggregation);
  static Propagation identity(std::size_t num_nodes);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  /// P * h
  Matrix apply(const Matrix& h) const;
  /// P^T * g
  Matrix apply_transpose(const Matrix& g) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> columns_;
  std::vector<double> coefficients_;
};

/// One message-passing layer: act(P * H * W + b), P from `Propagation::build`.
Matrix gcn_layer_forward(const LabeledGraph& graph, const Matrix& input, const Matrix& weight,
                         std::span<const double> bias, std::span<const double> edge_weights,
                         Activation activation,
                         Aggregation aggregation = Aggregation::kWeightedMean);

struct LossWithGradient {
  double value = 0.0;
  std::vector<double> gradient;  // d loss / d prediction
};

/// -sum_i [alpha y_i log p_i + (1 - alpha)(1 - y_i) log(1 - p_i)], with p
/// clamped to [eps, 1 - eps]. The gradient is taken at the clamped value.
LossWithGradient wbce_loss(std::span<const double> predictions, std::span<const int> labels,
                           double alpha);
/// -sum_i [y_i log p_i + (1 - y_i) log(1 - p_i)]
LossWithGradient bce_loss(std::span<const double> predictions, std::span<const int> labels);

struct CrossEntropyResult {
  double value = 0.0;
  Matrix gradient;  // d loss / d logits
};

/// Mean softmax cross-entropy over the rows of `logits`.
CrossEntropyResult cross_entropy_loss(const Matrix& logits, std::span<const int> labels);

}  // namespace graphost
