#include "graphost/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>

#include "graphost/checkpoint.hpp"
#include "graphost/error.hpp"
#include "graphost/graph_io.hpp"
#include "graphost/metrics.hpp"
#include "graphost/rng.hpp"

namespace graphost {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return CounterRng::from_seed(seed, tag).bits_at(0);
}

nlohmann::json training_to_json(const TrainingConfig& c) {
  return {{"learning_rate", c.adam.learning_rate},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"epsilon", c.adam.epsilon},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"edge_loss", to_string(c.edge_loss)},
          {"holdout_fraction", c.holdout_fraction},
          {"loss_tail", c.loss_tail}};
}

TrainingConfig training_from_json(const nlohmann::json& j) {
  TrainingConfig c;
  c.adam.learning_rate = j.value("learning_rate", c.adam.learning_rate);
  c.adam.beta1 = j.value("beta1", c.adam.beta1);
  c.adam.beta2 = j.value("beta2", c.adam.beta2);
  c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.holdout_fraction = j.value("holdout_fraction", c.holdout_fraction);
  c.loss_tail = j.value("loss_tail", c.loss_tail);
  const std::string loss = j.value("edge_loss", std::string(to_string(c.edge_loss)));
  if (loss == to_string(EdgeLoss::kWeighted)) {
    c.edge_loss = EdgeLoss::kWeighted;
  } else if (loss == to_string(EdgeLoss::kPlain)) {
    c.edge_loss = EdgeLoss::kPlain;
  } else {
    throw Error("unknown edge loss '" + loss + "'");
  }
  return c;
}

std::optional<double> hd_or_null(const std::vector<Edge>& edges, std::span<const int> truth) {
  if (edges.empty()) return std::nullopt;
  return edge_homophily_degree(edges, truth);
}

/// Accumulates per-seed values for a fixed, ordered set of arms.
class ReportBuilder {
 public:
  ReportBuilder(std::string experiment, const ExperimentOptions& options) {
    if (options.seeds.empty()) throw Error("an experiment needs at least one seed");
    options.transform.validate();
    report_.experiment = std::move(experiment);
    report_.timestamp = options.timestamp.value_or(utc_timestamp());
    report_.seeds = options.seeds;
    report_.config = {{"transform", options.transform},
                      {"metric", to_string(options.metric)},
                      {"seeds", options.seeds}};
    for (const auto& [key, value] : options.extra_config.items()) report_.config[key] = value;
  }

  nlohmann::json& config() { return report_.config; }

  void record(const std::string& arm, const std::string& metric, double value,
              std::optional<double> hd, std::size_t removed) {
    auto it = std::find_if(report_.arms.begin(), report_.arms.end(),
                           [&](const ArmSeries& a) { return a.name == arm; });
    if (it == report_.arms.end()) {
      report_.arms.push_back(ArmSeries{arm, metric, {}, 0.0, std::nullopt, {}, {}});
      it = std::prev(report_.arms.end());
    }
    it->values.push_back(value);
    it->hd.push_back(hd);
    it->removed_edges.push_back(removed);
  }

  ExperimentReport finish() {
    for (auto& arm : report_.arms) arm.summarize();
    report_.validate();
    return std::move(report_);
  }

 private:
  ExperimentReport report_;
};

struct ArmOutcome {
  double value = 0.0;
  std::optional<double> hd;
  std::size_t removed = 0;
};

ArmOutcome evaluate_base(const TrialInputs& in, std::span<const int> truth, Metric metric) {
  return {evaluate_classifier(*in.classifier, WeightedGraph::unit(in.test_graph), truth, metric),
          hd_or_null(in.test_graph.edges(), truth), 0};
}

ArmOutcome evaluate_transform(const TrialInputs& in, const LabeledGraph& unlabeled,
                              const EdgeScoreTable& scores, TransformConfig config,
                              std::span<const int> truth, Metric metric) {
  config.mode = in.mode;
  const TransformResult t = graphost_transform(unlabeled, scores, config);
  return {evaluate_classifier(*in.classifier, t.graph, truth, metric),
          hd_or_null(t.graph.graph().edges(), truth), t.removed_edges};
}

void check_inputs(const TrialInputs& in) {
  if (!in.classifier || !in.predictor) throw Error("trial inputs lack a checkpoint");
  if (in.mode == TransformMode::kAuto) throw Error("trial inputs must carry a resolved mode");
  if (!in.test_graph.has_labels()) throw Error("scoring an experiment needs test labels");
}

std::string format_ratio(double r) {
  std::ostringstream out;
  out.precision(2);
  out << r;
  return out.str();
}

}  // namespace

const char* to_string(Metric metric) {
  return metric == Metric::kAccuracy ? "accuracy" : "f1_macro";
}

Metric parse_metric(const std::string& s) {
  if (s == "accuracy") return Metric::kAccuracy;
  if (s == "f1_macro" || s == "f1") return Metric::kF1Macro;
  throw Error("unknown metric '" + s + "'");
}

TrialSource fixed_trials(Checkpoint classifier, Checkpoint predictor, LabeledGraph test_graph,
                         TransformMode mode) {
  if (mode == TransformMode::kAuto) throw Error("fixed_trials needs a resolved mode");
  classifier.validate();
  predictor.validate();
  TrialInputs inputs{std::make_shared<const Checkpoint>(std::move(classifier)),
                     std::make_shared<const Checkpoint>(std::move(predictor)),
                     std::move(test_graph), mode};
  return [inputs = std::move(inputs)](std::uint64_t) { return inputs; };
}

void FixtureSpec::validate() const {
  train.validate();
  test.validate();
  if (train.num_classes() != test.num_classes() || train.feature_dim() != test.feature_dim()) {
    throw Error("fixture train and test parameters disagree on classes or feature dimension");
  }
  if (!(test_feature_noise >= 0.0) || !std::isfinite(test_feature_noise)) {
    throw Error("fixture feature noise must be a finite non-negative variance");
  }
  ArchitectureSpec::make(ModelKind::kGcn, train.feature_dim(), train.num_classes(), num_layers,
                         hidden)
      .validate();
}

void to_json(nlohmann::json& j, const FixtureSpec& f) {
  j = {{"train", f.train},
       {"test", f.test},
       {"test_feature_noise", f.test_feature_noise},
       {"num_layers", f.num_layers},
       {"hidden", f.hidden},
       {"training", training_to_json(f.training)},
       {"mode", to_string(f.mode)}};
}

void from_json(const nlohmann::json& j, FixtureSpec& f) {
  f.train = j.at("train").get<CsbmParams>();
  f.test = j.contains("test") ? j.at("test").get<CsbmParams>() : f.train;
  f.test_feature_noise = j.value("test_feature_noise", 0.0);
  f.num_layers = j.value("num_layers", std::size_t{2});
  f.hidden = j.value("hidden", ArchitectureSpec::kDefaultHidden);
  f.training = j.contains("training") ? training_from_json(j.at("training")) : TrainingConfig{};
  f.mode = parse_transform_mode(j.value("mode", std::string("auto")));
  f.validate();
}

FixtureGraphs sample_fixture(const FixtureSpec& fixture, std::uint64_t seed) {
  fixture.validate();
  FixtureGraphs g;
  g.train = generate_csbm(fixture.train, derive_seed(seed, "fixture-train"));
  g.validation = generate_csbm(fixture.train, derive_seed(seed, "fixture-validation"));
  g.test = generate_csbm(fixture.test, derive_seed(seed, "fixture-test"));
  if (fixture.test_feature_noise > 0.0) {
    g.test = add_feature_noise(g.test, fixture.test_feature_noise,
                               derive_seed(seed, "fixture-test-noise"));
  }
  return g;
}

namespace {

ArchitectureSpec classifier_spec(const FixtureSpec& f) {
  return ArchitectureSpec::make(ModelKind::kGcn, f.train.feature_dim(), f.train.num_classes(),
                                f.num_layers, f.hidden);
}

ArchitectureSpec predictor_spec(const FixtureSpec& f) {
  return ArchitectureSpec::make(ModelKind::kGcn, f.train.feature_dim(), f.hidden, f.num_layers,
                                f.hidden);
}

Checkpoint train_fixture_predictor(const FixtureSpec& f, const FixtureGraphs& g,
                                   std::uint64_t seed, EdgeLoss loss) {
  TrainingConfig cfg = f.training;
  cfg.edge_loss = loss;
  return train_homophily_predictor(g.train, &g.validation, predictor_spec(f), cfg,
                                   derive_seed(seed, "fixture-predictor"));
}

}  // namespace

TrialInputs prepare_fixture_trial(const FixtureSpec& fixture, std::uint64_t seed,
                                  EdgeLoss predictor_loss) {
  const FixtureGraphs g = sample_fixture(fixture, seed);
  TrialInputs in;
  in.classifier = std::make_shared<const Checkpoint>(
      train_classifier(g.train, &g.validation, classifier_spec(fixture), fixture.training,
                       derive_seed(seed, "fixture-classifier")));
  in.predictor = std::make_shared<const Checkpoint>(
      train_fixture_predictor(fixture, g, seed, predictor_loss));
  in.mode = fixture.mode == TransformMode::kAuto ? resolve_mode(g.train) : fixture.mode;
  in.test_graph = g.test;
  return in;
}

TrialSource fixture_trials(FixtureSpec fixture) {
  fixture.validate();
  return [fixture = std::move(fixture)](std::uint64_t seed) {
    return prepare_fixture_trial(fixture, seed);
  };
}

void ArmSeries::summarize() {
  if (values.empty()) throw Error("arm '" + name + "' has no values");
  const double n = static_cast<double>(values.size());
  mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) {
    stddev.reset();
    return;
  }
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  stddev = std::sqrt(ss / (n - 1.0));
}

const ArmSeries& ExperimentReport::arm(const std::string& name) const {
  for (const auto& a : arms) {
    if (a.name == name) return a;
  }
  throw Error("report '" + experiment + "' has no arm '" + name + "'");
}

void ExperimentReport::validate() const {
  if (seeds.empty()) throw Error("report has no seeds");
  for (const auto& a : arms) {
    if (a.values.size() != seeds.size() || a.hd.size() != seeds.size() ||
        a.removed_edges.size() != seeds.size()) {
      throw Error("arm '" + a.name + "' does not have one entry per seed");
    }
    for (const double v : a.values) {
      if (!std::isfinite(v)) throw Error("arm '" + a.name + "' has a non-finite value");
    }
    if (!std::isfinite(a.mean) || (a.stddev && !std::isfinite(*a.stddev))) {
      throw Error("arm '" + a.name + "' has a non-finite summary");
    }
  }
}

nlohmann::json report_to_json(const ExperimentReport& report) {
  report.validate();
  nlohmann::json arms = nlohmann::json::array();
  for (const auto& a : report.arms) {
    nlohmann::json hd = nlohmann::json::array();
    for (const auto& h : a.hd) hd.push_back(h ? nlohmann::json(*h) : nlohmann::json(nullptr));
    arms.push_back({{"name", a.name},
                    {"metric", a.metric},
                    {"values", a.values},
                    {"mean", a.mean},
                    {"std", a.stddev ? nlohmann::json(*a.stddev) : nlohmann::json(nullptr)},
                    {"hd", std::move(hd)},
                    {"removed_edges", a.removed_edges}});
  }
  return {{"experiment", report.experiment},
          {"timestamp", report.timestamp},
          {"seeds", report.seeds},
          {"config", report.config},
          {"arms", std::move(arms)}};
}

std::string report_to_csv(const ExperimentReport& report) {
  report.validate();
  std::ostringstream out;
  out << "arm,metric,seed,value,hd,removed_edges\n";
  for (const auto& a : report.arms) {
    for (std::size_t s = 0; s < report.seeds.size(); ++s) {
      out << a.name << ',' << a.metric << ',' << report.seeds[s] << ','
          << format_double(a.values[s]) << ',' << (a.hd[s] ? format_double(*a.hd[s]) : "") << ','
          << a.removed_edges[s] << '\n';
    }
  }
  for (const auto& a : report.arms) {
    out << a.name << ',' << a.metric << ",mean," << format_double(a.mean) << ",,\n";
    out << a.name << ',' << a.metric << ",std," << (a.stddev ? format_double(*a.stddev) : "")
        << ",,\n";
  }
  return out.str();
}

std::string report_basename(const ExperimentReport& report) {
  const auto& s = report.seeds;
  std::string seedset;
  bool consecutive = s.size() >= 3;
  for (std::size_t i = 1; consecutive && i < s.size(); ++i) consecutive = s[i] == s[i - 1] + 1;
  if (consecutive) {
    seedset = "s" + std::to_string(s.front()) + "to" + std::to_string(s.back());
  } else {
    seedset = "s";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i > 0) seedset += '_';
      seedset += std::to_string(s[i]);
    }
  }
  return report.experiment + "-" + report.timestamp + "-" + seedset;
}

std::filesystem::path write_report(const ExperimentReport& report,
                                   const std::filesystem::path& directory) {
  // Render both files before touching the disk so a failure leaves nothing.
  const nlohmann::json j = report_to_json(report);
  const std::string csv = report_to_csv(report);
  std::filesystem::create_directories(directory);
  const std::string base = report_basename(report);
  const auto json_path = directory / (base + ".json");
  write_json_file(j, json_path);
  std::ofstream out(directory / (base + ".csv"), std::ios::binary);
  if (!out) throw Error("cannot write " + (directory / (base + ".csv")).string());
  out << csv;
  return json_path;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

double evaluate_classifier(const Checkpoint& classifier, const WeightedGraph& graph,
                           std::span<const int> truth, Metric metric) {
  const Prediction p = predict_labels(classifier, graph.graph(), graph.weights());
  if (metric == Metric::kAccuracy) return accuracy(p.labels, truth);
  return f1_macro(p.labels, truth, static_cast<int>(classifier.spec.output_dim()));
}

ExperimentReport run_evaluation(const TrialSource& source, const ExperimentOptions& options) {
  ReportBuilder builder("evaluate", options);
  const std::string metric = to_string(options.metric);
  for (const std::uint64_t seed : options.seeds) {
    const TrialInputs in = source(seed);
    check_inputs(in);
    const auto truth = in.test_graph.labels();
    const LabeledGraph unlabeled = in.test_graph.without_labels();
    const EdgeScoreTable scores = edge_homophily_scores(*in.predictor, unlabeled);
    const ArmOutcome base = evaluate_base(in, truth, options.metric);
    const ArmOutcome full =
        evaluate_transform(in, unlabeled, scores, options.transform, truth, options.metric);
    builder.record("base", metric, base.value, base.hd, base.removed);
    builder.record("graphost", metric, full.value, full.hd, full.removed);
  }
  return builder.finish();
}

ExperimentReport run_ablation(const TrialSource& source, const ExperimentOptions& options) {
  ReportBuilder builder("ablation", options);
  const std::string metric = to_string(options.metric);
  for (const std::uint64_t seed : options.seeds) {
    const TrialInputs in = source(seed);
    check_inputs(in);
    const auto truth = in.test_graph.labels();
    const LabeledGraph unlabeled = in.test_graph.without_labels();
    const EdgeScoreTable scores = edge_homophily_scores(*in.predictor, unlabeled);

    TransformConfig no_weight = options.transform;
    no_weight.enable_weighting = false;
    no_weight.enable_filtering = true;
    TransformConfig no_filter = options.transform;
    no_filter.enable_weighting = true;
    no_filter.enable_filtering = false;
    TransformConfig full = options.transform;
    full.enable_weighting = true;
    full.enable_filtering = true;

    const ArmOutcome base = evaluate_base(in, truth, options.metric);
    builder.record("base", metric, base.value, base.hd, base.removed);
    for (const auto& [name, cfg] : {std::pair{"w/o-weight", no_weight},
                                    std::pair{"w/o-filter", no_filter}, std::pair{"full", full}}) {
      const ArmOutcome o = evaluate_transform(in, unlabeled, scores, cfg, truth, options.metric);
      builder.record(name, metric, o.value, o.hd, o.removed);
    }
  }
  return builder.finish();
}

ExperimentReport run_noise_robustness(const TrialSource& source, const ExperimentOptions& options,
                                      const std::vector<double>& noise_levels) {
  if (noise_levels.empty()) throw Error("noise robustness needs at least one noise level");
  for (const double r : noise_levels) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error("noise levels must lie in [0, 1]");
  }
  ReportBuilder builder("noise-robustness", options);
  builder.config()["noise_levels"] = noise_levels;
  const std::string metric = to_string(options.metric);
  for (const std::uint64_t seed : options.seeds) {
    const TrialInputs clean = source(seed);
    check_inputs(clean);
    const auto truth = clean.test_graph.labels();
    for (const double r : noise_levels) {
      TrialInputs in = clean;
      if (r > 0.0) {
        in.test_graph =
            inject_structural_noise(clean.test_graph, r, derive_seed(seed, "noise-robustness"));
      }
      const LabeledGraph unlabeled = in.test_graph.without_labels();
      const EdgeScoreTable scores = edge_homophily_scores(*in.predictor, unlabeled);
      const ArmOutcome base = evaluate_base(in, truth, options.metric);
      const ArmOutcome full =
          evaluate_transform(in, unlabeled, scores, options.transform, truth, options.metric);
      builder.record("base@" + format_ratio(r), metric, base.value, base.hd, base.removed);
      builder.record("graphost@" + format_ratio(r), metric, full.value, full.hd, full.removed);
    }
  }
  return builder.finish();
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

ExperimentReport run_delta_sweep(const TrialSource& source, const ExperimentOptions& options,
                                 const std::vector<double>& deltas) {
  if (deltas.empty()) throw Error("delta sweep needs at least one delta");
  ReportBuilder builder("sweep-delta", options);
  builder.config()["deltas"] = deltas;
  const std::string metric = to_string(options.metric);
  for (const std::uint64_t seed : options.seeds) {
    const TrialInputs in = source(seed);
    check_inputs(in);
    const auto truth = in.test_graph.labels();
    const LabeledGraph unlabeled = in.test_graph.without_labels();
    const EdgeScoreTable scores = edge_homophily_scores(*in.predictor, unlabeled);
    const ArmOutcome base = evaluate_base(in, truth, options.metric);
    builder.record("base", metric, base.value, base.hd, base.removed);
    for (const double d : deltas) {
      TransformConfig cfg = options.transform;
      cfg.delta = d;
      cfg.validate();
      const ArmOutcome o = evaluate_transform(in, unlabeled, scores, cfg, truth, options.metric);
      builder.record("delta=" + format_ratio(d), metric, o.value, o.hd, o.removed);
    }
  }
  return builder.finish();
}

ExperimentReport run_random_drop_comparison(const TrialSource& source,
                                            const ExperimentOptions& options) {
  ReportBuilder builder("random-drop", options);
  const std::string metric = to_string(options.metric);
  for (const std::uint64_t seed : options.seeds) {
    const TrialInputs in = source(seed);
    check_inputs(in);
    const auto truth = in.test_graph.labels();
    const LabeledGraph unlabeled = in.test_graph.without_labels();
    const EdgeScoreTable scores = edge_homophily_scores(*in.predictor, unlabeled);
    const ArmOutcome base = evaluate_base(in, truth, options.metric);
    const ArmOutcome full =
        evaluate_transform(in, unlabeled, scores, options.transform, truth, options.metric);

    const LabeledGraph dropped =
        random_edge_drop(in.test_graph, full.removed, derive_seed(seed, "random-drop"));
    const std::size_t random_removed = in.test_graph.num_edges() - dropped.num_edges();
    if (random_removed != full.removed) throw Error("random drop count does not match the transform");
    const double random_value = evaluate_classifier(*in.classifier, WeightedGraph::unit(dropped),
                                                    truth, options.metric);

    builder.record("base", metric, base.value, base.hd, base.removed);
    builder.record("random", metric, random_value, hd_or_null(dropped.edges(), truth),
                   random_removed);
    builder.record("graphost", metric, full.value, full.hd, full.removed);
  }
  return builder.finish();
}

ExperimentReport run_loss_comparison(const FixtureSpec& fixture, const ExperimentOptions& options) {
  fixture.validate();
  ExperimentOptions opts = options;
  opts.extra_config["fixture"] = fixture;
  ReportBuilder builder("loss-comparison", opts);
  const std::string metric = to_string(options.metric);
  for (const std::uint64_t seed : options.seeds) {
    const FixtureGraphs g = sample_fixture(fixture, seed);
    TrialInputs in;
    in.classifier = std::make_shared<const Checkpoint>(
        train_classifier(g.train, &g.validation, classifier_spec(fixture), fixture.training,
                         derive_seed(seed, "fixture-classifier")));
    in.mode = fixture.mode == TransformMode::kAuto ? resolve_mode(g.train) : fixture.mode;
    in.test_graph = g.test;
    const auto truth = in.test_graph.labels();
    const LabeledGraph unlabeled = in.test_graph.without_labels();
    const EdgeTrainingSet test_edges = build_edge_training_set(in.test_graph);

    const ArmOutcome base = evaluate_base(in, truth, options.metric);
    builder.record("base", metric, base.value, base.hd, base.removed);
    for (const auto& [suffix, loss] :
         {std::pair{"wbce", EdgeLoss::kWeighted}, std::pair{"bce", EdgeLoss::kPlain}}) {
      in.predictor =
          std::make_shared<const Checkpoint>(train_fixture_predictor(fixture, g, seed, loss));
      const EdgeScoreTable scores = edge_homophily_scores(*in.predictor, unlabeled);
      const ArmOutcome o =
          evaluate_transform(in, unlabeled, scores, options.transform, truth, options.metric);
      builder.record(std::string("graphost/") + suffix, metric, o.value, o.hd, o.removed);
      builder.record(std::string("auc/") + suffix, "roc_auc",
                     roc_auc(scores.scores, test_edges.labels), std::nullopt, 0);
    }
  }
  return builder.finish();
}

}  // namespace graphost
