#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphost/graph.hpp"
#include "graphost/matrix.hpp"
#include "graphost/nn.hpp"
#include "graphost/optim.hpp"

namespace graphost {

enum class ModelKind { kGcn, kMlp };

/// Layer widths from input to output. Hidden layers use ReLU, the last layer
/// is linear. GCN layers propagate with self-loops; MLP layers do not
/// propagate at all.
struct ArchitectureSpec {
  ModelKind kind = ModelKind::kGcn;
  std::vector<std::size_t> layer_dims;
  Aggregation aggregation = Aggregation::kWeightedMean;

  static constexpr std::size_t kDefaultHidden = 32;
  static constexpr std::size_t kMinLayers = 2;
  static constexpr std::size_t kMaxLayers = 5;

  /// input -> hidden x (num_layers - 1) -> output
  static ArchitectureSpec make(ModelKind kind, std::size_t input_dim, std::size_t output_dim,
                               std::size_t num_layers = 2,
                               std::size_t hidden = kDefaultHidden);

  std::size_t num_layers() const noexcept {
    return layer_dims.empty() ? 0 : layer_dims.size() - 1;
  }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
  void validate() const;

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

struct DenseLayer {
  Matrix weight;             // in x out
  std::vector<double> bias;  // out

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

enum class ModelRole { kClassifier, kHomophilyPredictor };

/// Which edge objective the predictor minimises.
enum class EdgeLoss { kWeighted, kPlain };

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_validation_metric = 0.0;
  std::vector<double> loss_tail;
  std::optional<double> alpha;
  std::string loss;

  friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

/// Frozen parameters plus the architecture they belong to.
struct Checkpoint {
  ModelRole role = ModelRole::kClassifier;
  ArchitectureSpec spec;
  std::vector<DenseLayer> layers;
  TrainingMetadata metadata;

  /// Throws `Error` when tensor shapes disagree with `spec` or values are
  /// not finite.
  void validate() const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct TrainingConfig {
  AdamConfig adam;
  std::size_t max_epochs = 1000;
  std::size_t patience = 50;
  EdgeLoss edge_loss = EdgeLoss::kWeighted;
  /// Share of training edges held out for predictor early stopping when no
  /// validation graph is supplied.
  double holdout_fraction = 0.1;
  /// Number of trailing epoch losses kept in the checkpoint metadata.
  std::size_t loss_tail = 10;
};

/// Parameters drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)), seeded.
Checkpoint initialize_checkpoint(ModelRole role, const ArchitectureSpec& spec,
                                 std::uint64_t seed);

/// Per-layer cache of a forward pass, consumed by `backward_pass`.
struct ForwardCache {
  std::vector<Matrix> aggregated;       // P * H_l
  std::vector<Matrix> pre_activations;  // P * H_l * W_l + b_l
};

/// Propagation operator implied by the checkpoint's architecture.
Propagation make_propagation(const ArchitectureSpec& spec, const LabeledGraph& graph,
                             std::span<const double> edge_weights = {});

Matrix forward_pass(const std::vector<DenseLayer>& layers, const Propagation& propagation,
                    const Matrix& input, ForwardCache* cache = nullptr);

/// Gradients w.r.t. every layer given d loss / d output.
std::vector<DenseLayer> backward_pass(const std::vector<DenseLayer>& layers,
                                      const Propagation& propagation, const ForwardCache& cache,
                                      const Matrix& output_gradient);

/// Mean cross-entropy of the classifier over every labelled node of `graph`.
/// Fills `gradients` when non-null.
double classifier_objective(const Checkpoint& classifier, const LabeledGraph& graph,
                            std::vector<DenseLayer>* gradients = nullptr);

/// Edge labels for homophily-predictor training: 1 for homophilic edges.
struct EdgeTrainingSet {
  std::vector<Edge> edges;
  std::vector<int> labels;
  /// |E_het| / (|E_het| + |E_hom|)
  double alpha = 0.0;
};

EdgeTrainingSet build_edge_training_set(const LabeledGraph& graph);

/// Edge objective of the predictor on `edges` of `graph`: WBCE with `alpha`
/// (kWeighted) or plain BCE (kPlain) of sigmoid(cos(z_u, z_v)).
double predictor_objective(const Checkpoint& predictor, const LabeledGraph& graph,
                           std::span<const Edge> edges, std::span<const int> edge_labels,
                           double alpha, EdgeLoss loss,
                           std::vector<DenseLayer>* gradients = nullptr);

/// Fits the fixed classifier by cross-entropy with Adam; early stopping on
/// validation accuracy (validation loss breaks ties). Falls back to the
/// training graph when `validation` is null.
Checkpoint train_classifier(const LabeledGraph& train, const LabeledGraph* validation,
                            const ArchitectureSpec& spec, const TrainingConfig& config,
                            std::uint64_t seed);

/// Fits the node encoder of the homophily predictor on training edges only;
/// early stopping on validation-edge ROC-AUC. Without a validation graph a
/// seeded `holdout_fraction` of the training edges is held out. Throws
/// `DegenerateEdgeClassesError` if the training graph lacks either edge class.
Checkpoint train_homophily_predictor(const LabeledGraph& train, const LabeledGraph* validation,
                                     const ArchitectureSpec& spec, const TrainingConfig& config,
                                     std::uint64_t seed);

/// Logits [n x c]. An empty `edge_weights` means all weights 1.
Matrix classifier_logits(const Checkpoint& classifier, const LabeledGraph& graph,
                         std::span<const double> edge_weights = {});

struct Prediction {
  std::vector<int> labels;
  Matrix probabilities;
};

/// Argmax of the softmax rows; ties go to the lowest class index.
Prediction predict_labels(const Checkpoint& classifier, const LabeledGraph& graph,
                          std::span<const double> edge_weights = {});
std::vector<int> argmax_rows(const Matrix& m);

/// Encoder output Z for every node.
Matrix node_embeddings(const Checkpoint& predictor, const LabeledGraph& graph);

/// Homophily confidence per canonical edge.
struct EdgeScoreTable {
  std::vector<double> scores;

  std::size_t size() const noexcept { return scores.size(); }
  friend bool operator==(const EdgeScoreTable&, const EdgeScoreTable&) = default;
};

/// s_hom(e) = sigmoid(cos(z_u, z_v)) for every edge of `graph`.
EdgeScoreTable edge_homophily_scores(const Checkpoint& predictor, const LabeledGraph& graph);
/// Same, from precomputed embeddings.
EdgeScoreTable edge_scores_from_embeddings(const Matrix& embeddings, std::span<const Edge> edges);

const char* to_string(ModelKind kind);
const char* to_string(ModelRole role);
const char* to_string(EdgeLoss loss);
const char* to_string(Aggregation aggregation);

}  // namespace graphost
