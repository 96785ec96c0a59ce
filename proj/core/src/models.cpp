#include "graphost/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "graphost/error.hpp"
#include "graphost/metrics.hpp"
#include "graphost/rng.hpp"

namespace graphost {

const char* to_string(ModelKind kind) { return kind == ModelKind::kGcn ? "gcn" : "mlp"; }
const char* to_string(ModelRole role) {
  return role == ModelRole::kClassifier ? "classifier" : "homophily_predictor";
}
const char* to_string(EdgeLoss loss) { return loss == EdgeLoss::kWeighted ? "wbce" : "bce"; }
const char* to_string(Aggregation aggregation) {
  return aggregation == Aggregation::kWeightedMean ? "weighted_mean" : "sum";
}

ArchitectureSpec ArchitectureSpec::make(ModelKind kind, std::size_t input_dim,
                                        std::size_t output_dim, std::size_t num_layers,
                                        std::size_t hidden) {
  ArchitectureSpec spec;
  spec.kind = kind;
  spec.layer_dims.push_back(input_dim);
  for (std::size_t l = 0; l + 1 < num_layers; ++l) spec.layer_dims.push_back(hidden);
  spec.layer_dims.push_back(output_dim);
  spec.validate();
  return spec;
}

void ArchitectureSpec::validate() const {
  const std::size_t layers = num_layers();
  if (layers < kMinLayers || layers > kMaxLayers) {
    throw Error("architecture must have between " + std::to_string(kMinLayers) + " and " +
                std::to_string(kMaxLayers) + " layers, got " + std::to_string(layers));
  }
  for (const auto d : layer_dims) {
    if (d == 0) throw Error("architecture layer widths must be positive");
  }
}

void Checkpoint::validate() const {
  spec.validate();
  if (layers.size() != spec.num_layers()) {
    throw Error("checkpoint has " + std::to_string(layers.size()) + " layers, architecture has " +
                std::to_string(spec.num_layers()));
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weight.rows() != spec.layer_dims[l] ||
        layer.weight.cols() != spec.layer_dims[l + 1] ||
        layer.bias.size() != spec.layer_dims[l + 1]) {
      throw Error("checkpoint layer " + std::to_string(l) + " shape does not match architecture");
    }
    if (!layer.weight.all_finite() ||
        !std::all_of(layer.bias.begin(), layer.bias.end(),
                     [](double v) { return std::isfinite(v); })) {
      throw Error("checkpoint layer " + std::to_string(l) + " holds non-finite values");
    }
  }
}

Checkpoint initialize_checkpoint(ModelRole role, const ArchitectureSpec& spec,
                                 std::uint64_t seed) {
  spec.validate();
  Checkpoint ckpt;
  ckpt.role = role;
  ckpt.spec = spec;
  ckpt.metadata.seed = seed;
  const CounterRng root = CounterRng::from_seed(seed, "weight-init");
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const std::size_t in = spec.layer_dims[l];
    const std::size_t out = spec.layer_dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    CounterRng rng = root.substream(l);
    DenseLayer layer{Matrix(in, out), std::vector<double>(out)};
    for (auto& w : layer.weight.values()) w = bound * (2.0 * rng.uniform() - 1.0);
    for (auto& b : layer.bias) b = bound * (2.0 * rng.uniform() - 1.0);
    ckpt.layers.push_back(std::move(layer));
  }
  return ckpt;
}

Propagation make_propagation(const ArchitectureSpec& spec, const LabeledGraph& graph,
                             std::span<const double> edge_weights) {
  if (spec.kind == ModelKind::kMlp) return Propagation::identity(graph.num_nodes());
  return Propagation::build(graph, edge_weights, spec.aggregation);
}

Matrix forward_pass(const std::vector<DenseLayer>& layers, const Propagation& propagation,
                    const Matrix& input, ForwardCache* cache) {
  if (cache) {
    cache->aggregated.clear();
    cache->pre_activations.clear();
  }
  Matrix h = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (h.cols() != layer.weight.rows()) throw Error("forward_pass: input width mismatch");
    Matrix aggregated = propagation.apply(h);
    Matrix z = matmul(aggregated, layer.weight);
    add_row_vector(z, layer.bias);
    const bool last = l + 1 == layers.size();
    if (cache) {
      cache->aggregated.push_back(std::move(aggregated));
      cache->pre_activations.push_back(z);
    }
    if (!last) {
      for (auto& v : z.values()) v = std::max(v, 0.0);
    }
    h = std::move(z);
  }
  return h;
}

std::vector<DenseLayer> backward_pass(const std::vector<DenseLayer>& layers,
                                      const Propagation& propagation, const ForwardCache& cache,
                                      const Matrix& output_gradient) {
  std::vector<DenseLayer> grads(layers.size());
  Matrix upstream = output_gradient;  // d loss / d H_{l+1}
  for (std::size_t idx = layers.size(); idx-- > 0;) {
    const bool last = idx + 1 == layers.size();
    Matrix dz = std::move(upstream);
    if (!last) {
      const auto& z = cache.pre_activations[idx];
      auto dv = dz.values();
      const auto zv = z.values();
      for (std::size_t k = 0; k < dv.size(); ++k) {
        if (zv[k] <= 0.0) dv[k] = 0.0;
      }
    }
    grads[idx].weight = matmul_transpose_a(cache.aggregated[idx], dz);
    grads[idx].bias = column_sums(dz);
    if (idx > 0) upstream = propagation.apply_transpose(matmul_transpose_b(dz, layers[idx].weight));
  }
  return grads;
}

double classifier_objective(const Checkpoint& classifier, const LabeledGraph& graph,
                            std::vector<DenseLayer>* gradients) {
  const Propagation prop = make_propagation(classifier.spec, graph);
  ForwardCache cache;
  const Matrix logits =
      forward_pass(classifier.layers, prop, graph.features(), gradients ? &cache : nullptr);
  CrossEntropyResult ce = cross_entropy_loss(logits, graph.labels());
  if (gradients) *gradients = backward_pass(classifier.layers, prop, cache, ce.gradient);
  return ce.value;
}

EdgeTrainingSet build_edge_training_set(const LabeledGraph& graph) {
  const auto labels = graph.labels();
  EdgeTrainingSet set;
  set.edges = graph.edges();
  set.labels.reserve(set.edges.size());
  std::size_t heterophilic = 0;
  for (const auto& e : set.edges) {
    const bool same = labels[e.u] == labels[e.v];
    set.labels.push_back(same ? 1 : 0);
    heterophilic += same ? 0 : 1;
  }
  set.alpha = set.edges.empty()
                  ? 0.0
                  : static_cast<double>(heterophilic) / static_cast<double>(set.edges.size());
  return set;
}

EdgeScoreTable edge_scores_from_embeddings(const Matrix& embeddings,
                                           std::span<const Edge> edges) {
  EdgeScoreTable table;
  table.scores.reserve(edges.size());
  for (const auto& e : edges) {
    table.scores.push_back(sigmoid(cosine_similarity(embeddings.row(e.u), embeddings.row(e.v))));
  }
  return table;
}

double predictor_objective(const Checkpoint& predictor, const LabeledGraph& graph,
                           std::span<const Edge> edges, std::span<const int> edge_labels,
                           double alpha, EdgeLoss loss, std::vector<DenseLayer>* gradients) {
  const Propagation prop = make_propagation(predictor.spec, graph);
  ForwardCache cache;
  const Matrix z =
      forward_pass(predictor.layers, prop, graph.features(), gradients ? &cache : nullptr);
  const EdgeScoreTable scores = edge_scores_from_embeddings(z, edges);
  const LossWithGradient l = loss == EdgeLoss::kWeighted
                                 ? wbce_loss(scores.scores, edge_labels, alpha)
                                 : bce_loss(scores.scores, edge_labels);
  if (gradients) {
    Matrix dz(z.rows(), z.cols());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const double s = scores.scores[k];
      // Inside the clamp band the loss is flat in s.
      const bool clamped = s < kProbabilityEpsilon || s > 1.0 - kProbabilityEpsilon;
      const double upstream = clamped ? 0.0 : l.gradient[k] * s * (1.0 - s);
      cosine_similarity_backward(z.row(edges[k].u), z.row(edges[k].v), upstream,
                                 dz.row(edges[k].u), dz.row(edges[k].v));
    }
    *gradients = backward_pass(predictor.layers, prop, cache, dz);
  }
  return l.value;
}

namespace {

struct LayerOptimizer {
  std::vector<AdamState> weight_states;
  std::vector<AdamState> bias_states;

  LayerOptimizer(const std::vector<DenseLayer>& layers, const AdamConfig& cfg) {
    for (const auto& layer : layers) {
      weight_states.emplace_back(layer.weight.size(), cfg);
      bias_states.emplace_back(layer.bias.size(), cfg);
    }
  }

  void step(std::vector<DenseLayer>& layers, const std::vector<DenseLayer>& grads) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      adam_step(layers[l].weight.values(), grads[l].weight.values(), weight_states[l]);
      adam_step(layers[l].bias, grads[l].bias, bias_states[l]);
    }
  }
};

// Tracks the best parameters seen so far and decides when to stop.
class EarlyStopper {
 public:
  EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Higher metric wins; equal metric with lower loss also counts.
  bool observe(std::size_t epoch, double metric, double loss,
               const std::vector<DenseLayer>& layers) {
    const bool better =
        epoch == 1 || metric > best_metric_ || (metric == best_metric_ && loss < best_loss_);
    if (better) {
      best_metric_ = metric;
      best_loss_ = loss;
      best_epoch_ = epoch;
      best_layers_ = layers;
      since_best_ = 0;
    } else {
      ++since_best_;
    }
    return since_best_ >= patience_;
  }

  double best_metric() const { return best_metric_; }
  std::size_t best_epoch() const { return best_epoch_; }
  std::vector<DenseLayer>& best_layers() { return best_layers_; }

 private:
  std::size_t patience_;
  std::size_t since_best_ = 0;
  std::size_t best_epoch_ = 0;
  double best_metric_ = -std::numeric_limits<double>::infinity();
  double best_loss_ = std::numeric_limits<double>::infinity();
  std::vector<DenseLayer> best_layers_;
};

void check_finite_loss(double loss, std::size_t epoch, const char* what) {
  if (!std::isfinite(loss)) {
    throw TrainingDivergedError(std::string(what) + " loss became non-finite at epoch " +
                                std::to_string(epoch) + "; try a smaller learning rate");
  }
}

void push_tail(std::vector<double>& tail, double value, std::size_t keep) {
  if (keep == 0) return;
  if (tail.size() == keep) tail.erase(tail.begin());
  tail.push_back(value);
}

void require_compatible(const ArchitectureSpec& spec, const LabeledGraph& graph,
                        const char* what) {
  if (spec.input_dim() != graph.feature_dim()) {
    throw Error(std::string(what) + ": architecture expects " + std::to_string(spec.input_dim()) +
                " input features, graph has " + std::to_string(graph.feature_dim()));
  }
}

}  // namespace

Checkpoint train_classifier(const LabeledGraph& train, const LabeledGraph* validation,
                            const ArchitectureSpec& spec, const TrainingConfig& config,
                            std::uint64_t seed) {
  require_compatible(spec, train, "train_classifier");
  if (spec.output_dim() != static_cast<std::size_t>(train.num_classes())) {
    throw Error("train_classifier: output width " + std::to_string(spec.output_dim()) +
                " does not match " + std::to_string(train.num_classes()) + " classes");
  }
  const auto train_labels = train.labels();
  const LabeledGraph& val = validation ? *validation : train;
  require_compatible(spec, val, "train_classifier");
  const auto val_labels = val.labels();

  Checkpoint ckpt = initialize_checkpoint(ModelRole::kClassifier, spec, seed);
  const Propagation train_prop = make_propagation(spec, train);
  const Propagation val_prop = make_propagation(spec, val);
  LayerOptimizer optimizer(ckpt.layers, config.adam);
  EarlyStopper stopper(config.patience);

  std::size_t epoch = 0;
  while (epoch < config.max_epochs) {
    ++epoch;
    ForwardCache cache;
    const Matrix logits = forward_pass(ckpt.layers, train_prop, train.features(), &cache);
    CrossEntropyResult ce = cross_entropy_loss(logits, train_labels);
    check_finite_loss(ce.value, epoch, "classifier");
    optimizer.step(ckpt.layers, backward_pass(ckpt.layers, train_prop, cache, ce.gradient));
    push_tail(ckpt.metadata.loss_tail, ce.value, config.loss_tail);

    const Matrix val_logits = forward_pass(ckpt.layers, val_prop, val.features());
    const double val_loss = cross_entropy_loss(val_logits, val_labels).value;
    const double val_acc = accuracy(argmax_rows(val_logits), val_labels);
    if (stopper.observe(epoch, val_acc, val_loss, ckpt.layers)) break;
  }
  ckpt.layers = std::move(stopper.best_layers());
  ckpt.metadata.epochs_run = epoch;
  ckpt.metadata.best_epoch = stopper.best_epoch();
  ckpt.metadata.best_validation_metric = stopper.best_metric();
  ckpt.metadata.loss = "cross_entropy";
  return ckpt;
}

Checkpoint train_homophily_predictor(const LabeledGraph& train, const LabeledGraph* validation,
                                     const ArchitectureSpec& spec, const TrainingConfig& config,
                                     std::uint64_t seed) {
  require_compatible(spec, train, "train_homophily_predictor");
  const EdgeTrainingSet full = build_edge_training_set(train);
  if (full.edges.empty() || full.alpha == 0.0 || full.alpha == 1.0) {
    throw DegenerateEdgeClassesError(
        "degenerate edge classes: the training graph needs both homophilic and heterophilic "
        "edges (alpha = " + std::to_string(full.alpha) + ")");
  }

  // Validation edges: the validation graph when it has both edge classes,
  // otherwise a seeded hold-out of the training edges.
  std::optional<EdgeTrainingSet> val_set;
  if (validation) {
    require_compatible(spec, *validation, "train_homophily_predictor");
    EdgeTrainingSet candidate = build_edge_training_set(*validation);
    if (!candidate.edges.empty() && candidate.alpha > 0.0 && candidate.alpha < 1.0) {
      val_set = std::move(candidate);
    }
  }
  EdgeTrainingSet fit = full;
  EdgeTrainingSet holdout;
  if (!val_set) {
    CounterRng rng = CounterRng::from_seed(seed, "predictor-holdout");
    std::vector<std::size_t> order(full.edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    const auto n_hold = std::max<std::size_t>(
        1, static_cast<std::size_t>(config.holdout_fraction * static_cast<double>(order.size())));
    std::vector<bool> held(order.size(), false);
    for (std::size_t k = 0; k < n_hold; ++k) held[order[k]] = true;
    fit.edges.clear();
    fit.labels.clear();
    for (std::size_t k = 0; k < full.edges.size(); ++k) {
      auto& dst = held[k] ? holdout : fit;
      dst.edges.push_back(full.edges[k]);
      dst.labels.push_back(full.labels[k]);
    }
    holdout.alpha = full.alpha;
  }
  const LabeledGraph& val_graph = val_set ? *validation : train;
  const EdgeTrainingSet& val_edges = val_set ? *val_set : holdout;
  const bool val_auc_defined =
      std::find(val_edges.labels.begin(), val_edges.labels.end(), 0) != val_edges.labels.end() &&
      std::find(val_edges.labels.begin(), val_edges.labels.end(), 1) != val_edges.labels.end();

  Checkpoint ckpt = initialize_checkpoint(ModelRole::kHomophilyPredictor, spec, seed);
  ckpt.metadata.alpha = full.alpha;
  ckpt.metadata.loss = to_string(config.edge_loss);
  const Propagation train_prop = make_propagation(spec, train);
  const Propagation val_prop = make_propagation(spec, val_graph);
  LayerOptimizer optimizer(ckpt.layers, config.adam);
  EarlyStopper stopper(config.patience);

  std::size_t epoch = 0;
  while (epoch < config.max_epochs) {
    ++epoch;
    std::vector<DenseLayer> grads;
    const double loss = predictor_objective(ckpt, train, fit.edges, fit.labels, full.alpha,
                                            config.edge_loss, &grads);
    check_finite_loss(loss, epoch, "homophily predictor");
    optimizer.step(ckpt.layers, grads);
    push_tail(ckpt.metadata.loss_tail, loss, config.loss_tail);

    const Matrix z = forward_pass(ckpt.layers, val_prop, val_graph.features());
    const EdgeScoreTable scores = edge_scores_from_embeddings(z, val_edges.edges);
    const double val_loss = wbce_loss(scores.scores, val_edges.labels, full.alpha).value;
    const double val_auc = val_auc_defined ? roc_auc(scores.scores, val_edges.labels) : -val_loss;
    if (stopper.observe(epoch, val_auc, val_loss, ckpt.layers)) break;
  }
  ckpt.layers = std::move(stopper.best_layers());
  ckpt.metadata.epochs_run = epoch;
  ckpt.metadata.best_epoch = stopper.best_epoch();
  ckpt.metadata.best_validation_metric = stopper.best_metric();
  return ckpt;
}

Matrix classifier_logits(const Checkpoint& classifier, const LabeledGraph& graph,
                         std::span<const double> edge_weights) {
  require_compatible(classifier.spec, graph, "classifier_logits");
  return forward_pass(classifier.layers, make_propagation(classifier.spec, graph, edge_weights),
                      graph.features());
}

std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    // max_element returns the first maximum: ties go to the lowest index.
    out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

Prediction predict_labels(const Checkpoint& classifier, const LabeledGraph& graph,
                          std::span<const double> edge_weights) {
  Prediction p;
  p.probabilities = softmax_rows(classifier_logits(classifier, graph, edge_weights));
  p.labels = argmax_rows(p.probabilities);
  return p;
}

Matrix node_embeddings(const Checkpoint& predictor, const LabeledGraph& graph) {
  require_compatible(predictor.spec, graph, "node_embeddings");
  return forward_pass(predictor.layers, make_propagation(predictor.spec, graph),
                      graph.features());
}

EdgeScoreTable edge_homophily_scores(const Checkpoint& predictor, const LabeledGraph& graph) {
  return edge_scores_from_embeddings(node_embeddings(predictor, graph), graph.edges());
}

}  // namespace graphost
