#pragma once

#include <span>

#include "graphost/graph.hpp"

namespace graphost {

/// Fraction of matching entries. Throws on empty or unequal inputs.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Unweighted mean of per-class F1 over [0, num_classes). A class with no
/// true positives, no false positives and no false negatives scores 0.
double f1_macro(std::span<const int> predicted, std::span<const int> truth, int num_classes);

/// Mann-Whitney ROC-AUC: the probability that a random positive outranks a
/// random negative, ties counting 1/2. Throws `UndefinedMetricError` unless
/// both classes occur.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct HdDelta {
  double before = 0.0;
  double after = 0.0;
  double delta = 0.0;  // after - before
};

/// Edge homophily degree of two edge sets over the same labelled nodes.
HdDelta hd_delta_report(const LabeledGraph& before, const LabeledGraph& after,
                        std::span<const int> labels);

}  // namespace graphost
