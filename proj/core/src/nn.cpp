#include "graphost/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphost/error.hpp"

namespace graphost {

namespace {

void require_finite(std::span<const double> values, const char* where) {
  for (const double v : values) {
    if (!std::isfinite(v)) throw Error(std::string(where) + ": non-finite input");
  }
}

void require_weights(const LabeledGraph& graph, std::span<const double> w) {
  if (!w.empty() && w.size() != graph.num_edges()) {
    throw Error("edge weight count " + std::to_string(w.size()) + " does not match " +
                std::to_string(graph.num_edges()) + " edges");
  }
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

}  // namespace

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix softmax_rows(const Matrix& logits) {
  require_finite(logits.values(), "softmax");
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto in = logits.row(i);
    auto dst = out.row(i);
    const double m = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      dst[j] = std::exp(in[j] - m);
      z += dst[j];
    }
    for (auto& v : dst) v /= z;
  }
  return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("cosine_similarity: dimension mismatch");
  require_finite(u, "cosine_similarity");
  require_finite(v, "cosine_similarity");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    uv += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

void cosine_similarity_backward(std::span<const double> u, std::span<const double> v,
                                double upstream, std::span<double> du, std::span<double> dv) {
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    uv += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  if (uu == 0.0 || vv == 0.0) return;
  const double nu = std::sqrt(uu);
  const double nv = std::sqrt(vv);
  const double c = uv / (nu * nv);
  // d cos / du = v / (|u||v|) - cos * u / |u|^2, symmetric for v.
  const double inv = 1.0 / (nu * nv);
  for (std::size_t k = 0; k < u.size(); ++k) {
    du[k] += upstream * (v[k] * inv - c * u[k] / uu);
    dv[k] += upstream * (u[k] * inv - c * v[k] / vv);
  }
}

Matrix mean_aggregate(const LabeledGraph& graph, const Matrix& features,
                      std::span<const double> edge_weights) {
  if (features.rows() != graph.num_nodes()) {
    throw Error("mean_aggregate: feature rows do not match node count");
  }
  require_weights(graph, edge_weights);
  const Adjacency adj = Adjacency::build(graph);
  Matrix out(features.rows(), features.cols());
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    auto dst = out.row(i);
    double total = 0.0;
    for (std::size_t k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k) {
      const double w = edge_weights.empty() ? 1.0 : edge_weights[adj.edge_index[k]];
      if (w == 0.0) continue;
      const auto src = features.row(adj.sources[k]);
      for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += w * src[d];
      total += w;
    }
    if (total == 0.0) {
      const auto own = features.row(i);
      std::copy(own.begin(), own.end(), dst.begin());
    } else {
      for (auto& v : dst) v /= total;
    }
  }
  return out;
}

Propagation Propagation::build(const LabeledGraph& graph, std::span<const double> edge_weights,
                               Aggregation aggregation) {
  require_weights(graph, edge_weights);
  const Adjacency adj = Adjacency::build(graph);
  const std::size_t n = graph.num_nodes();
  Propagation p;
  p.offsets_.assign(n + 1, 0);
  p.columns_.reserve(adj.sources.size() + n);
  p.coefficients_.reserve(adj.sources.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row_begin = p.columns_.size();
    bool self_done = false;
    double total = 0.0;
    for (std::size_t k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k) {
      const NodeId j = adj.sources[k];
      if (!self_done && j > i) {
        p.columns_.push_back(static_cast<NodeId>(i));
        p.coefficients_.push_back(1.0);
        total += 1.0;
        self_done = true;
      }
      const double w = edge_weights.empty() ? 1.0 : edge_weights[adj.edge_index[k]];
      p.columns_.push_back(j);
      p.coefficients_.push_back(w);
      total += w;
    }
    if (!self_done) {
      p.columns_.push_back(static_cast<NodeId>(i));
      p.coefficients_.push_back(1.0);
      total += 1.0;
    }
    if (aggregation == Aggregation::kWeightedMean) {
      for (std::size_t k = row_begin; k < p.columns_.size(); ++k) p.coefficients_[k] /= total;
    }
    p.offsets_[i + 1] = p.columns_.size();
  }
  return p;
}

Propagation Propagation::identity(std::size_t num_nodes) {
  Propagation p;
  p.offsets_.resize(num_nodes + 1);
  p.columns_.resize(num_nodes);
  p.coefficients_.assign(num_nodes, 1.0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    p.offsets_[i] = i;
    p.columns_[i] = static_cast<NodeId>(i);
  }
  p.offsets_[num_nodes] = num_nodes;
  return p;
}

Matrix Propagation::apply(const Matrix& h) const {
  if (h.rows() != num_nodes()) throw Error("Propagation::apply: row count mismatch");
  Matrix out(h.rows(), h.cols());
  for (std::size_t i = 0; i < num_nodes(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const double c = coefficients_[k];
      const auto src = h.row(columns_[k]);
      for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += c * src[d];
    }
  }
  return out;
}

Matrix Propagation::apply_transpose(const Matrix& g) const {
  if (g.rows() != num_nodes()) throw Error("Propagation::apply_transpose: row count mismatch");
  Matrix out(g.rows(), g.cols());
  for (std::size_t i = 0; i < num_nodes(); ++i) {
    const auto src = g.row(i);
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const double c = coefficients_[k];
      auto dst = out.row(columns_[k]);
      for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += c * src[d];
    }
  }
  return out;
}

Matrix gcn_layer_forward(const LabeledGraph& graph, const Matrix& input, const Matrix& weight,
                         std::span<const double> bias, std::span<const double> edge_weights,
                         Activation activation, Aggregation aggregation) {
  if (input.rows() != graph.num_nodes() || input.cols() != weight.rows() ||
      bias.size() != weight.cols()) {
    throw Error("gcn_layer_forward: shape mismatch");
  }
  const Propagation prop = Propagation::build(graph, edge_weights, aggregation);
  Matrix out = matmul(prop.apply(input), weight);
  add_row_vector(out, bias);
  if (activation == Activation::kRelu) {
    for (auto& v : out.values()) v = std::max(v, 0.0);
  }
  return out;
}

namespace {

LossWithGradient weighted_log_loss(std::span<const double> predictions,
                                   std::span<const int> labels, double pos_weight,
                                   double neg_weight) {
  if (predictions.size() != labels.size()) throw Error("log loss: length mismatch");
  require_finite(predictions, "log loss");
  LossWithGradient out;
  out.gradient.resize(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double p = clamp_probability(predictions[i]);
    if (labels[i] == 1) {
      out.value += pos_weight * -std::log(p);
      out.gradient[i] = -pos_weight / p;
    } else if (labels[i] == 0) {
      out.value += neg_weight * -std::log(1.0 - p);
      out.gradient[i] = neg_weight / (1.0 - p);
    } else {
      throw Error("log loss: labels must be 0 or 1");
    }
  }
  return out;
}

}  // namespace

LossWithGradient wbce_loss(std::span<const double> predictions, std::span<const int> labels,
                           double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("wbce_loss: alpha must lie in [0, 1]");
  return weighted_log_loss(predictions, labels, alpha, 1.0 - alpha);
}

LossWithGradient bce_loss(std::span<const double> predictions, std::span<const int> labels) {
  return weighted_log_loss(predictions, labels, 1.0, 1.0);
}

CrossEntropyResult cross_entropy_loss(const Matrix& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows()) throw Error("cross_entropy_loss: label count mismatch");
  if (logits.rows() == 0) throw Error("cross_entropy_loss: empty batch");
  CrossEntropyResult out{0.0, softmax_rows(logits)};
  const double inv_n = 1.0 / static_cast<double>(logits.rows());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= logits.cols()) {
      throw Error("cross_entropy_loss: label out of range");
    }
    // log-softmax via log-sum-exp keeps the value consistent with the
    // analytic gradient even for saturated rows.
    const auto z = logits.row(i);
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (const double v : z) sum += std::exp(v - m);
    out.value -= z[static_cast<std::size_t>(y)] - m - std::log(sum);
    auto g = out.gradient.row(i);
    g[static_cast<std::size_t>(y)] -= 1.0;
    for (auto& v : g) v *= inv_n;
  }
  out.value *= inv_n;
  return out;
}

}  // namespace graphost
