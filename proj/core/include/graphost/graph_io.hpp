#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "graphost/graph.hpp"

namespace graphost {

/// On-disk graph layouts.
///
/// kEdgeList: three sibling files sharing a base path,
///   <base>.edges         "u v" per line, 0-based, '#' comments allowed.
///                        An optional "# graphost directed=<0|1> num_classes=<c>"
///                        header carries the graph-level fields.
///   <base>.features.csv  headerless CSV, row i = node i (defines num_nodes)
///   <base>.labels.csv    one class index per line (optional)
/// kJson: a single object
///   {"num_nodes", "directed", "edges": [[u, v], ...], "features": [[...]],
///    "labels": [...], "num_classes"}; "labels" may be omitted for test graphs.
enum class GraphFormat { kEdgeList, kJson };

/// kJson for a ".json" extension, otherwise kEdgeList.
GraphFormat format_from_path(const std::filesystem::path& path);

LabeledGraph load_graph(const std::filesystem::path& path, GraphFormat format);
void save_graph(const LabeledGraph& graph, const std::filesystem::path& path, GraphFormat format);

inline LabeledGraph load_graph(const std::filesystem::path& path) {
  return load_graph(path, format_from_path(path));
}
inline void save_graph(const LabeledGraph& graph, const std::filesystem::path& path) {
  save_graph(graph, path, format_from_path(path));
}

nlohmann::json graph_to_json(const LabeledGraph& graph);
LabeledGraph graph_from_json(const nlohmann::json& j);

/// JSON container plus an "edge_weights" array aligned with "edges".
nlohmann::json weighted_graph_to_json(const WeightedGraph& graph);
WeightedGraph weighted_graph_from_json(const nlohmann::json& j);
void save_weighted_graph(const WeightedGraph& graph, const std::filesystem::path& path);
WeightedGraph load_weighted_graph(const std::filesystem::path& path);

/// Reads and parses a JSON document; syntax errors become `ParseError` with
/// the byte offset.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace graphost
