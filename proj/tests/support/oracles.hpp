#pragma once

// Test-only reference implementations. Each one is written the slow, obvious
// way and shares no code with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "graphost/graph.hpp"
#include "graphost/models.hpp"

namespace graphost::oracle {

inline std::filesystem::path fixture_dir() { return GRAPHOST_TEST_FIXTURE_DIR; }

inline std::vector<std::filesystem::path> fixture_files() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(fixture_dir())) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Phi(x) from the C library's complementary error function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// ||a - b|| / max(||a||, ||b||), or 0 when both vanish.
inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

/// Central differences of f at x with step h, one coordinate at a time.
inline std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Every weight and bias of a checkpoint, layer by layer.
inline std::vector<double> flatten(const std::vector<DenseLayer>& layers) {
  std::vector<double> out;
  for (const auto& l : layers) {
    out.insert(out.end(), l.weight.values().begin(), l.weight.values().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

inline void unflatten(std::span<const double> flat, std::vector<DenseLayer>& layers) {
  std::size_t k = 0;
  for (auto& l : layers) {
    for (std::size_t r = 0; r < l.weight.rows(); ++r) {
      for (std::size_t c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[k++];
    }
    for (auto& b : l.bias) b = flat[k++];
  }
}

/// Counting loop over the edge list.
inline double homophily_degree(const std::vector<Edge>& edges, std::span<const int> labels) {
  std::size_t same = 0;
  for (const auto& e : edges) same += labels[e.u] == labels[e.v] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(edges.size());
}

/// Removes the k most harmful edges by repeatedly scanning for the largest
/// remaining harmfulness (first index wins on ties).
inline std::vector<Edge> remove_top_harmful(const std::vector<Edge>& edges,
                                            const std::vector<double>& harm, std::size_t k) {
  std::vector<bool> removed(edges.size(), false);
  for (std::size_t round = 0; round < k; ++round) {
    std::size_t best = edges.size();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (removed[i]) continue;
      if (best == edges.size() || harm[i] > harm[best]) best = i;
    }
    removed[best] = true;
  }
  std::vector<Edge> kept;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!removed[i]) kept.push_back(edges[i]);
  }
  return kept;
}

/// 1 for same-label endpoints, else 0.
inline std::vector<double> label_scores(const std::vector<Edge>& edges,
                                        std::span<const int> labels) {
  std::vector<double> s;
  for (const auto& e : edges) s.push_back(labels[e.u] == labels[e.v] ? 1.0 : 0.0);
  return s;
}

/// HD after deleting k edges of the harmful kind first (then the other kind),
/// computed from counts alone.
inline double hd_after_oracle_filter(std::size_t hom, std::size_t het, std::size_t k,
                                     bool homophilic_mode) {
  std::size_t h = hom, t = het;
  if (homophilic_mode) {
    const std::size_t from_het = std::min(k, t);
    t -= from_het;
    h -= k - from_het;
  } else {
    const std::size_t from_hom = std::min(k, h);
    h -= from_hom;
    t -= k - from_hom;
  }
  return static_cast<double>(h) / static_cast<double>(h + t);
}

}  // namespace graphost::oracle
