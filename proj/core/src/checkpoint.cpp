#include "graphost/checkpoint.hpp"

#include <string>

#include "graphost/error.hpp"
#include "graphost/graph_io.hpp"

namespace graphost {

using nlohmann::json;

namespace {

json tensor_to_json(const Matrix& m) {
  return json{{"shape", {m.rows(), m.cols()}}, {"data", m.data()}};
}

json tensor_to_json(const std::vector<double>& v) {
  return json{{"shape", {v.size()}}, {"data", v}};
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  auto data = j.at("data").get<std::vector<double>>();
  if (shape.size() != 2 || shape[0] * shape[1] != data.size()) {
    throw Error(where + ": tensor shape does not match its data length");
  }
  return Matrix(shape[0], shape[1], std::move(data));
}

std::vector<double> vector_from_json(const json& j, const std::string& where) {
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  auto data = j.at("data").get<std::vector<double>>();
  if (shape.size() != 1 || shape[0] != data.size()) {
    throw Error(where + ": tensor shape does not match its data length");
  }
  return data;
}

}  // namespace

json architecture_to_json(const ArchitectureSpec& spec) {
  return json{{"kind", to_string(spec.kind)},
              {"layer_dims", spec.layer_dims},
              {"aggregation", to_string(spec.aggregation)}};
}

ArchitectureSpec architecture_from_json(const json& j) {
  ArchitectureSpec spec;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gcn") spec.kind = ModelKind::kGcn;
  else if (kind == "mlp") spec.kind = ModelKind::kMlp;
  else throw Error("unknown architecture kind '" + kind + "'");
  spec.layer_dims = j.at("layer_dims").get<std::vector<std::size_t>>();
  const auto agg = j.value("aggregation", std::string("weighted_mean"));
  if (agg == "weighted_mean") spec.aggregation = Aggregation::kWeightedMean;
  else if (agg == "sum") spec.aggregation = Aggregation::kSum;
  else throw Error("unknown aggregation '" + agg + "'");
  return spec;
}

json checkpoint_to_json(const Checkpoint& ckpt) {
  json layers = json::array();
  for (const auto& layer : ckpt.layers) {
    layers.push_back({{"weight", tensor_to_json(layer.weight)}, {"bias", tensor_to_json(layer.bias)}});
  }
  const auto& m = ckpt.metadata;
  json meta{{"seed", m.seed},
            {"epochs_run", m.epochs_run},
            {"best_epoch", m.best_epoch},
            {"best_validation_metric", m.best_validation_metric},
            {"loss", m.loss},
            {"loss_tail", m.loss_tail}};
  meta["alpha"] = m.alpha ? json(*m.alpha) : json(nullptr);
  return json{{"format_version", kCheckpointFormatVersion},
              {"role", to_string(ckpt.role)},
              {"architecture", architecture_to_json(ckpt.spec)},
              {"layers", std::move(layers)},
              {"metadata", std::move(meta)}};
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw Error("checkpoint format version " + std::to_string(version) +
                  " is not supported (expected " + std::to_string(kCheckpointFormatVersion) + ")");
    }
    Checkpoint ckpt;
    const auto role = j.at("role").get<std::string>();
    if (role == "classifier") ckpt.role = ModelRole::kClassifier;
    else if (role == "homophily_predictor") ckpt.role = ModelRole::kHomophilyPredictor;
    else throw Error("unknown checkpoint role '" + role + "'");
    ckpt.spec = architecture_from_json(j.at("architecture"));
    const auto& layers = j.at("layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string where = "layer " + std::to_string(l);
      ckpt.layers.push_back({matrix_from_json(layers[l].at("weight"), where + " weight"),
                             vector_from_json(layers[l].at("bias"), where + " bias")});
    }
    if (j.contains("metadata")) {
      const auto& m = j["metadata"];
      auto& md = ckpt.metadata;
      md.seed = m.value("seed", std::uint64_t{0});
      md.epochs_run = m.value("epochs_run", std::size_t{0});
      md.best_epoch = m.value("best_epoch", std::size_t{0});
      md.best_validation_metric = m.value("best_validation_metric", 0.0);
      md.loss = m.value("loss", std::string());
      md.loss_tail = m.value("loss_tail", std::vector<double>{});
      if (m.contains("alpha") && !m["alpha"].is_null()) md.alpha = m["alpha"].get<double>();
    }
    ckpt.validate();
    return ckpt;
  } catch (const json::exception& e) {
    throw Error(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  ckpt.validate();
  write_json_file(checkpoint_to_json(ckpt), path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_json_file(path));
}

}  // namespace graphost
