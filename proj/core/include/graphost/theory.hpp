#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphost/csbm.hpp"

namespace graphost {

using Vector = std::vector<double>;

/// Regime of a two-class CSBM: homophilic iff p > q.
enum class Regime { kHomophilic, kHeterophilic };
const char* to_string(Regime regime);

/// Expected strict-neighbour mean embedding of class `class_index` (0 or 1):
/// (p mu_1 + q mu_2) / (p + q) for class 0 and the mirror for class 1.
Vector expected_embedding(int class_index, double p, double q, const Vector& mu1,
                          const Vector& mu2);
/// s-class analogue: (p mu_v + q sum_{j != v} mu_j) / (p + (s - 1) q).
Vector expected_embedding_multiclass(std::size_t class_index, double p, double q,
                                     const std::vector<Vector>& means);

/// (a + b) / 2
Vector midpoint(const Vector& a, const Vector& b);
/// (mu1 - mu2) / ||mu1 - mu2||; throws when mu1 == mu2.
Vector direction(const Vector& mu1, const Vector& mu2);

/// Hyperplane {h : o^T h - o^T m = 0}. `orientation` = +1 puts class 0 on the
/// positive side (homophilic graphs), -1 on the negative side (heterophilic
/// graphs, where aggregation swaps the classes' sides).
struct BoundarySpec {
  Vector direction;
  Vector midpoint;
  int orientation = +1;

  /// Boundary through (mu1 + mu2) / 2 orthogonal to mu1 - mu2.
  static BoundarySpec from_means(const Vector& mu1, const Vector& mu2, int orientation = +1);
  /// Throws unless ||direction|| = 1 +- 1e-12 and dimensions agree.
  void validate() const;
};

/// o^T h - o^T m
double boundary_signed_value(const Vector& h, const BoundarySpec& boundary);
double boundary_signed_value(std::span<const double> h, const BoundarySpec& boundary);
/// 0 (class c1) when orientation * signed value > 0, else 1.
int classify_by_boundary(std::span<const double> h, const BoundarySpec& boundary);

/// Distance from either expected embedding to the boundary:
/// 0.5 * |p - q| / (p + q) * a.
double class_separation_distance(double p, double q, double mean_distance);

/// Standard normal CDF by the Abramowitz-Stegun 26.2.17 rational
/// approximation (absolute error < 7.5e-8).
double standard_normal_cdf(double x);

/// Phi(-a |p - q| sqrt(p n1 + q n2) / (2 (p + q))).
double misclassification_prob(double p, double q, double n1, double n2, double mean_distance);

/// Sign test for P_mis(p, q) > P_mis(p', q') once node degrees may change:
///   homophilic:   (p'-q')(p+q) sqrt(p'n1+q'n2) > (p-q)(p'+q') sqrt(pn1+qn2)
///   heterophilic: (q'-p')(p+q) sqrt(p'n1+q'n2) > (q-p)(p'+q') sqrt(pn1+qn2)
/// Throws when (p, q) or (p', q') contradict the regime.
bool degree_relaxation_constraint(double p, double q, double p_new, double q_new, double n1,
                                  double n2, Regime regime);

/// (mu1 + mu2)/2 + ln(n2/n1) / (2 sigma^2), the one-dimensional
/// equal-variance boundary under class imbalance.
double imbalanced_boundary(double mu1, double mu2, double sigma, double n1, double n2);

/// |p - q| / (p + (s - 1) q) * ||mu_v - mu_g||
double multiclass_separation(double p, double q, std::size_t num_classes, double mean_distance);

struct SimulationEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Misclassification rate of class c1 under the fixed midpoint boundary,
/// sampling h ~ N(E_c1[h], I / (p n1 + q n2)) directly.
SimulationEstimate simulate_misclassification(double p, double q, std::size_t n1, std::size_t n2,
                                              const Vector& mu1, const Vector& mu2,
                                              std::size_t samples, std::uint64_t seed);

/// Empirical statistics of strict-neighbour mean embeddings of one binary
/// CSBM sample. Isolated nodes are excluded and counted.
struct EmbeddingStatistics {
  std::array<Vector, 2> class_mean;
  std::array<Vector, 2> class_std;
  /// Within-class standard deviation of the raw node features, pooled over
  /// both classes and all nodes. The sampled midpoint inherits this noise
  /// through the features every embedding averages, so it is the scale for
  /// midpoint tolerances; `class_std` shrinks with degree and is not.
  Vector feature_std;
  std::array<std::size_t, 2> counted{};
  std::size_t excluded_isolated = 0;
  Vector midpoint;
  Vector difference;  // class_mean[0] - class_mean[1]
  /// cos(difference, (mu1 - mu2)/||mu1 - mu2||), signed.
  double cosine_with_direction = 0.0;
};

EmbeddingStatistics embedding_statistics(const CsbmParams& params, std::uint64_t seed);

struct TheoremTrial {
  std::uint64_t seed = 0;
  double rate_before = 0.0;
  double rate_after = 0.0;
  std::size_t excluded_before = 0;
  std::size_t excluded_after = 0;
};

struct TheoremCheckReport {
  Regime regime = Regime::kHomophilic;
  double p = 0.0, q = 0.0, p_new = 0.0, q_new = 0.0;
  std::size_t n1 = 0, n2 = 0;
  double mean_distance = 0.0;
  bool constraint_satisfied = false;
  double closed_form_before = 0.0;
  double closed_form_after = 0.0;
  std::vector<TheoremTrial> trials;
  double mean_before = 0.0;
  double mean_after = 0.0;
  double mean_difference = 0.0;  // mean_after - mean_before
  std::size_t improved_trials = 0;
};

/// For each trial: sample node features once, sample the edge set under
/// (p, q) and independently under (p', q'), aggregate by strict-neighbour
/// mean, and classify every non-isolated node with the boundary built from
/// the original parameters. Both parameter sets must share sizes and means.
TheoremCheckReport monte_carlo_theorem_check(const CsbmParams& original,
                                             const CsbmParams& transformed, std::size_t trials,
                                             std::uint64_t seed);

nlohmann::json theorem_report_to_json(const TheoremCheckReport& report);
/// Header plus one row per trial.
std::string theorem_report_to_csv(const TheoremCheckReport& report);

}  // namespace graphost
