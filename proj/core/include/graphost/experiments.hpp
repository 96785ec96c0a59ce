#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphost/csbm.hpp"
#include "graphost/graph.hpp"
#include "graphost/models.hpp"
#include "graphost/transform.hpp"

namespace graphost {

enum class Metric { kAccuracy, kF1Macro };
const char* to_string(Metric metric);
Metric parse_metric(const std::string& s);

/// Everything one seeded trial needs. The test graph's labels are used for
/// scoring and HD reporting only; transforms never see them.
struct TrialInputs {
  std::shared_ptr<const Checkpoint> classifier;
  std::shared_ptr<const Checkpoint> predictor;
  LabeledGraph test_graph;
  /// Resolved regime (never kAuto).
  TransformMode mode = TransformMode::kHomophilic;
};

using TrialSource = std::function<TrialInputs(std::uint64_t seed)>;

/// The same checkpoints and test graph for every seed; only seeded
/// perturbations (noise, random drops) vary between seeds.
TrialSource fixed_trials(Checkpoint classifier, Checkpoint predictor, LabeledGraph test_graph,
                         TransformMode mode);

/// A synthetic setup that is regenerated and retrained for every seed.
struct FixtureSpec {
  CsbmParams train;
  CsbmParams test;
  /// Variance of the Gaussian noise added to the test features.
  double test_feature_noise = 0.0;
  std::size_t num_layers = 2;
  std::size_t hidden = ArchitectureSpec::kDefaultHidden;
  TrainingConfig training;
  /// kAuto resolves from the training graph.
  TransformMode mode = TransformMode::kAuto;

  void validate() const;
};

void to_json(nlohmann::json& j, const FixtureSpec& f);
void from_json(const nlohmann::json& j, FixtureSpec& f);

/// The graphs of one fixture trial.
struct FixtureGraphs {
  LabeledGraph train;
  LabeledGraph validation;
  LabeledGraph test;
};

/// Train, validation and test samples for `seed`. Train and validation share
/// the training parameters; the test sample uses the test parameters plus
/// feature noise.
FixtureGraphs sample_fixture(const FixtureSpec& fixture, std::uint64_t seed);

/// Trains both models on the fixture sample for `seed`.
TrialInputs prepare_fixture_trial(const FixtureSpec& fixture, std::uint64_t seed,
                                  EdgeLoss predictor_loss = EdgeLoss::kWeighted);

TrialSource fixture_trials(FixtureSpec fixture);

/// Per-seed values of one arm.
struct ArmSeries {
  std::string name;
  std::string metric;
  std::vector<double> values;
  double mean = 0.0;
  /// Sample standard deviation; absent with fewer than two seeds.
  std::optional<double> stddev;
  /// Edge homophily degree of the graph the arm evaluated, per seed (null
  /// when that graph has no edges).
  std::vector<std::optional<double>> hd;
  /// Edges removed relative to the test graph, per seed.
  std::vector<std::size_t> removed_edges;

  /// Recomputes mean and stddev from `values`.
  void summarize();
};

struct ExperimentReport {
  std::string experiment;
  std::string timestamp;
  std::vector<std::uint64_t> seeds;
  nlohmann::json config;
  std::vector<ArmSeries> arms;

  const ArmSeries& arm(const std::string& name) const;
  /// Throws unless every value is finite and every arm has one entry per seed.
  void validate() const;
};

nlohmann::json report_to_json(const ExperimentReport& report);
/// Long format: one row per (arm, seed) followed by one summary row per arm.
std::string report_to_csv(const ExperimentReport& report);
/// "<experiment>-<timestamp>-<seedset>"
std::string report_basename(const ExperimentReport& report);
/// Writes `<basename>.json` and `<basename>.csv` into `directory` and
/// returns the JSON path.
std::filesystem::path write_report(const ExperimentReport& report,
                                   const std::filesystem::path& directory);

/// Current UTC time as YYYYMMDDTHHMMSSZ.
std::string utc_timestamp();

/// Shared settings of every experiment runner.
struct ExperimentOptions {
  std::vector<std::uint64_t> seeds;
  TransformConfig transform;
  Metric metric = Metric::kAccuracy;
  /// Used verbatim instead of the clock when set.
  std::optional<std::string> timestamp;
  /// Copied into the report next to the runner's own settings.
  nlohmann::json extra_config = nlohmann::json::object();
};

/// Score of the classifier on a (weighted) graph against `truth`.
double evaluate_classifier(const Checkpoint& classifier, const WeightedGraph& graph,
                           std::span<const int> truth, Metric metric);

/// Arms: base and graphost (the configured transform).
ExperimentReport run_evaluation(const TrialSource& source, const ExperimentOptions& options);

/// Arms: base, w/o-weight, w/o-filter, full.
ExperimentReport run_ablation(const TrialSource& source, const ExperimentOptions& options);

/// Arms: base@r and graphost@r for every structural noise ratio r.
ExperimentReport run_noise_robustness(const TrialSource& source, const ExperimentOptions& options,
                                      const std::vector<double>& noise_levels = {0.0, 0.1, 0.3,
                                                                                  0.5});

/// 0, 0.1, ..., 0.9
std::vector<double> default_delta_grid();

/// Arms: base and delta=<d> for every grid point.
ExperimentReport run_delta_sweep(const TrialSource& source, const ExperimentOptions& options,
                                 const std::vector<double>& deltas = default_delta_grid());

/// Arms: base, random (as many uniformly dropped edges as the transform
/// removes) and graphost.
ExperimentReport run_random_drop_comparison(const TrialSource& source,
                                            const ExperimentOptions& options);

/// Retrains the predictor with WBCE and with plain BCE on each fixture seed.
/// Arms: base, graphost/wbce, graphost/bce (downstream metric) and
/// auc/wbce, auc/bce (edge ROC-AUC on the test graph).
ExperimentReport run_loss_comparison(const FixtureSpec& fixture, const ExperimentOptions& options);

}  // namespace graphost
