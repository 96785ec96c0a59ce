#include "graphost/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "graphost/error.hpp"

namespace graphost {

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw Error("accuracy: length mismatch");
  if (truth.empty()) throw UndefinedMetricError("accuracy of an empty prediction is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double f1_macro(std::span<const int> predicted, std::span<const int> truth, int num_classes) {
  if (predicted.size() != truth.size()) throw Error("f1_macro: length mismatch");
  if (num_classes <= 0) throw Error("f1_macro: num_classes must be positive");
  const auto c = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> tp(c, 0), fp(c, 0), fn(c, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predicted[i];
    const int t = truth[i];
    if (p < 0 || p >= num_classes || t < 0 || t >= num_classes) {
      throw Error("f1_macro: label out of range");
    }
    if (p == t) {
      ++tp[static_cast<std::size_t>(p)];
    } else {
      ++fp[static_cast<std::size_t>(p)];
      ++fn[static_cast<std::size_t>(t)];
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    const std::size_t denom = 2 * tp[k] + fp[k] + fn[k];
    if (denom > 0) total += 2.0 * static_cast<double>(tp[k]) / static_cast<double>(denom);
  }
  return total / static_cast<double>(c);
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("roc_auc: length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      const int y = labels[order[k]];
      if (y != 0 && y != 1) throw Error("roc_auc: labels must be 0 or 1");
      if (y == 1) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("ROC-AUC is undefined unless both classes are present");
  }
  const double np = static_cast<double>(positives);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

HdDelta hd_delta_report(const LabeledGraph& before, const LabeledGraph& after,
                        std::span<const int> labels) {
  if (labels.size() != before.num_nodes() || labels.size() != after.num_nodes()) {
    throw Error("hd_delta_report: label count does not match the graphs");
  }
  HdDelta out;
  out.before = edge_homophily_degree(before.edges(), labels);
  out.after = edge_homophily_degree(after.edges(), labels);
  out.delta = out.after - out.before;
  return out;
}

}  // namespace graphost
