#include "graphost/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "graphost/error.hpp"

namespace graphost {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path with_suffix(const fs::path& base, const char* suffix) {
  return fs::path(base.string() + suffix);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const fs::path& file, std::size_t line, const std::string& msg) {
  throw ParseError(file.string() + ":" + std::to_string(line) + ": " + msg, line);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p.string() + " for reading");
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error("cannot open " + p.string() + " for writing");
  return out;
}

struct EdgeFile {
  std::vector<std::pair<Edge, std::size_t>> edges;  // edge, source line
  bool directed = false;
  int num_classes = -1;
};

EdgeFile read_edge_file(const fs::path& path) {
  auto in = open_in(path);
  EdgeFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      std::string_view body = trim(s.substr(1));
      if (body.starts_with("graphost")) {
        std::istringstream fields{std::string(body.substr(8))};
        std::string kv;
        while (fields >> kv) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) fail(path, lineno, "malformed header field '" + kv + "'");
          const std::string key = kv.substr(0, eq);
          int value = 0;
          if (!parse_number(std::string_view(kv).substr(eq + 1), value)) {
            fail(path, lineno, "malformed header value '" + kv + "'");
          }
          if (key == "directed") out.directed = value != 0;
          else if (key == "num_classes") out.num_classes = value;
        }
      }
      continue;
    }
    std::istringstream tokens{std::string(s)};
    std::string a, b, extra;
    if (!(tokens >> a >> b) || (tokens >> extra)) {
      fail(path, lineno, "expected 'u v', got '" + std::string(s) + "'");
    }
    Edge e;
    if (!parse_number(a, e.u) || !parse_number(b, e.v)) {
      fail(path, lineno, "non-integer node index in '" + std::string(s) + "'");
    }
    out.edges.emplace_back(e, lineno);
  }
  return out;
}

Matrix read_features_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    std::size_t count = 0;
    if (!s.empty()) {
      std::size_t pos = 0;
      while (true) {
        const auto comma = s.find(',', pos);
        const auto token = trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos));
        double v = 0.0;
        if (!parse_number(token, v)) {
          fail(path, lineno, "malformed number '" + std::string(token) + "'");
        }
        data.push_back(v);
        ++count;
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
    }
    if (rows == 0) cols = count;
    else if (count != cols) {
      fail(path, lineno, "expected " + std::to_string(cols) + " columns, found " +
                             std::to_string(count));
    }
    ++rows;
  }
  return Matrix(rows, cols, std::move(data));
}

std::vector<int> read_labels_csv(const fs::path& path, std::size_t expected_rows) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty()) continue;
    int y = 0;
    if (!parse_number(s, y) || y < 0) fail(path, lineno, "malformed label '" + std::string(s) + "'");
    if (labels.size() == expected_rows) {
      fail(path, lineno, "more labels than the " + std::to_string(expected_rows) + " feature rows");
    }
    labels.push_back(y);
  }
  if (labels.size() != expected_rows) {
    fail(path, lineno, "found " + std::to_string(labels.size()) + " labels for " +
                           std::to_string(expected_rows) + " feature rows");
  }
  return labels;
}

LabeledGraph load_edge_list(const fs::path& base) {
  const fs::path edge_path = with_suffix(base, ".edges");
  const fs::path feat_path = with_suffix(base, ".features.csv");
  const fs::path label_path = with_suffix(base, ".labels.csv");

  EdgeFile ef = read_edge_file(edge_path);
  Matrix features = read_features_csv(feat_path);
  const std::size_t n = features.rows();

  std::vector<Edge> edges;
  edges.reserve(ef.edges.size());
  for (const auto& [e, line] : ef.edges) {
    if (e.u >= n || e.v >= n) {
      fail(edge_path, line, "node index " + std::to_string(std::max(e.u, e.v)) +
                                " out of range for " + std::to_string(n) + " nodes");
    }
    if (e.u == e.v) fail(edge_path, line, "self-loop at node " + std::to_string(e.u));
    edges.push_back(e);
  }

  std::optional<std::vector<int>> labels;
  int num_classes = ef.num_classes < 0 ? 0 : ef.num_classes;
  if (fs::exists(label_path)) {
    labels = read_labels_csv(label_path, n);
    if (ef.num_classes < 0) {
      for (const int y : *labels) num_classes = std::max(num_classes, y + 1);
    }
  }
  return LabeledGraph(n, std::move(edges), std::move(features), std::move(labels), num_classes,
                      ef.directed);
}

void save_edge_list(const LabeledGraph& g, const fs::path& base) {
  {
    auto out = open_out(with_suffix(base, ".edges"));
    out << "# graphost directed=" << (g.directed() ? 1 : 0) << " num_classes=" << g.num_classes()
        << "\n";
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
  }
  {
    auto out = open_out(with_suffix(base, ".features.csv"));
    const Matrix& x = g.features();
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < x.cols(); ++j) {
        if (j) out << ',';
        out << format_double(x(i, j));
      }
      out << '\n';
    }
  }
  const fs::path label_path = with_suffix(base, ".labels.csv");
  if (g.has_labels()) {
    auto out = open_out(label_path);
    for (const int y : g.labels()) out << y << '\n';
  } else if (fs::exists(label_path)) {
    fs::remove(label_path);
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

GraphFormat format_from_path(const fs::path& path) {
  return path.extension() == ".json" ? GraphFormat::kJson : GraphFormat::kEdgeList;
}

json read_json_file(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
  }
}

void write_json_file(const json& j, const fs::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json graph_to_json(const LabeledGraph& g) {
  json j;
  j["num_nodes"] = g.num_nodes();
  j["directed"] = g.directed();
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  json features = json::array();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto row = g.features().row(i);
    features.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["features"] = std::move(features);
  if (g.has_labels()) {
    const auto labels = g.labels();
    j["labels"] = std::vector<int>(labels.begin(), labels.end());
  }
  j["num_classes"] = g.num_classes();
  return j;
}

LabeledGraph graph_from_json(const json& j) {
  try {
    const auto n = j.at("num_nodes").get<std::size_t>();
    const bool directed = j.value("directed", false);
    std::vector<Edge> edges;
    for (const auto& pair : j.at("edges")) {
      if (!pair.is_array() || pair.size() != 2) throw Error("each edge must be a [u, v] pair");
      edges.push_back({pair[0].get<NodeId>(), pair[1].get<NodeId>()});
    }
    const auto& rows = j.at("features");
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    if (rows.size() != n) {
      throw Error("\"features\" has " + std::to_string(rows.size()) + " rows for " +
                  std::to_string(n) + " nodes");
    }
    std::vector<double> data;
    data.reserve(n * cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) {
        throw Error("\"features\" row " + std::to_string(i) + " has " +
                    std::to_string(rows[i].size()) + " columns, expected " + std::to_string(cols));
      }
      for (const auto& v : rows[i]) data.push_back(v.get<double>());
    }
    std::optional<std::vector<int>> labels;
    if (j.contains("labels") && !j["labels"].is_null()) labels = j["labels"].get<std::vector<int>>();
    int num_classes = j.value("num_classes", 0);
    if (labels && !j.contains("num_classes")) {
      for (const int y : *labels) num_classes = std::max(num_classes, y + 1);
    }
    return LabeledGraph(n, std::move(edges), Matrix(n, cols, std::move(data)), std::move(labels),
                        num_classes, directed);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid graph JSON: ") + e.what());
  }
}

json weighted_graph_to_json(const WeightedGraph& g) {
  json j = graph_to_json(g.graph());
  j["edge_weights"] = std::vector<double>(g.weights().begin(), g.weights().end());
  return j;
}

WeightedGraph weighted_graph_from_json(const json& j) {
  LabeledGraph g = graph_from_json(j);
  if (!j.contains("edge_weights")) return WeightedGraph::unit(std::move(g));
  const auto raw_weights = j.at("edge_weights").get<std::vector<double>>();
  const auto& raw_edges = j.at("edges");
  if (raw_weights.size() != raw_edges.size()) {
    throw Error("\"edge_weights\" has " + std::to_string(raw_weights.size()) + " entries for " +
                std::to_string(raw_edges.size()) + " edges");
  }
  // Re-align weights with the canonical edge order.
  std::vector<std::pair<Edge, double>> keyed;
  keyed.reserve(raw_weights.size());
  for (std::size_t k = 0; k < raw_weights.size(); ++k) {
    Edge e{raw_edges[k][0].get<NodeId>(), raw_edges[k][1].get<NodeId>()};
    if (!g.directed() && e.u > e.v) std::swap(e.u, e.v);
    keyed.emplace_back(e, raw_weights[k]);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> weights;
  weights.reserve(keyed.size());
  for (std::size_t k = 0; k < keyed.size(); ++k) {
    if (k > 0 && keyed[k].first == keyed[k - 1].first) {
      throw Error("duplicate weighted edge (" + std::to_string(keyed[k].first.u) + ", " +
                  std::to_string(keyed[k].first.v) + ")");
    }
    weights.push_back(keyed[k].second);
  }
  return WeightedGraph(std::move(g), std::move(weights));
}

void save_weighted_graph(const WeightedGraph& graph, const fs::path& path) {
  write_json_file(weighted_graph_to_json(graph), path);
}

WeightedGraph load_weighted_graph(const fs::path& path) {
  return weighted_graph_from_json(read_json_file(path));
}

LabeledGraph load_graph(const fs::path& path, GraphFormat format) {
  if (format == GraphFormat::kJson) return graph_from_json(read_json_file(path));
  return load_edge_list(path);
}

void save_graph(const LabeledGraph& graph, const fs::path& path, GraphFormat format) {
  if (format == GraphFormat::kJson) {
    write_json_file(graph_to_json(graph), path);
  } else {
    save_edge_list(graph, path);
  }
}

}  // namespace graphost
