#include "graphost/theory.hpp"

#include <cmath>
#include <sstream>

#include "graphost/error.hpp"
#include "graphost/graph_io.hpp"
#include "graphost/nn.hpp"
#include "graphost/rng.hpp"

namespace graphost {

namespace {

void require_positive_mass(double p, double q) {
  if (!(p + q > 0.0)) throw Error("p + q must be positive");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

const char* to_string(Regime regime) {
  return regime == Regime::kHomophilic ? "homophilic" : "heterophilic";
}

Vector expected_embedding(int class_index, double p, double q, const Vector& mu1,
                          const Vector& mu2) {
  require_positive_mass(p, q);
  if (mu1.size() != mu2.size()) throw Error("expected_embedding: mean dimensions differ");
  if (class_index != 0 && class_index != 1) throw Error("expected_embedding: class must be 0 or 1");
  const double own = class_index == 0 ? p : q;
  const double other = class_index == 0 ? q : p;
  Vector out(mu1.size());
  for (std::size_t k = 0; k < mu1.size(); ++k) out[k] = (own * mu1[k] + other * mu2[k]) / (p + q);
  return out;
}

Vector expected_embedding_multiclass(std::size_t class_index, double p, double q,
                                     const std::vector<Vector>& means) {
  const std::size_t s = means.size();
  if (s < 2 || class_index >= s) throw Error("expected_embedding_multiclass: bad class index");
  const double denom = p + static_cast<double>(s - 1) * q;
  if (!(denom > 0.0)) throw Error("p + (s - 1) q must be positive");
  Vector out(means.front().size(), 0.0);
  for (std::size_t j = 0; j < s; ++j) {
    const double coeff = j == class_index ? p : q;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += coeff * means[j][k];
  }
  for (auto& v : out) v /= denom;
  return out;
}

Vector midpoint(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw Error("midpoint: dimensions differ");
  Vector m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = (a[k] + b[k]) / 2.0;
  return m;
}

Vector direction(const Vector& mu1, const Vector& mu2) {
  if (mu1.size() != mu2.size()) throw Error("direction: dimensions differ");
  Vector d(mu1.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = mu1[k] - mu2[k];
  const double n = norm(d);
  if (n == 0.0) throw Error("direction is undefined for identical means");
  for (auto& v : d) v /= n;
  return d;
}

BoundarySpec BoundarySpec::from_means(const Vector& mu1, const Vector& mu2, int orientation) {
  BoundarySpec b{graphost::direction(mu1, mu2), graphost::midpoint(mu1, mu2), orientation >= 0 ? +1 : -1};
  b.validate();
  return b;
}

void BoundarySpec::validate() const {
  if (direction.size() != midpoint.size()) throw Error("boundary: dimensions differ");
  if (std::abs(norm(direction) - 1.0) > 1e-12) throw Error("boundary direction is not unit length");
}

double boundary_signed_value(std::span<const double> h, const BoundarySpec& boundary) {
  if (h.size() != boundary.direction.size()) throw Error("boundary_signed_value: dimension mismatch");
  return dot(boundary.direction, h) - dot(boundary.direction, boundary.midpoint);
}

double boundary_signed_value(const Vector& h, const BoundarySpec& boundary) {
  return boundary_signed_value(std::span<const double>(h), boundary);
}

int classify_by_boundary(std::span<const double> h, const BoundarySpec& boundary) {
  return boundary.orientation * boundary_signed_value(h, boundary) > 0.0 ? 0 : 1;
}

double class_separation_distance(double p, double q, double mean_distance) {
  require_positive_mass(p, q);
  if (!(mean_distance >= 0.0)) throw Error("mean distance must be non-negative");
  return 0.5 * std::abs(p - q) / (p + q) * mean_distance;
}

double standard_normal_cdf(double x) {
  // Abramowitz & Stegun 26.2.17.
  constexpr double p = 0.2316419;
  constexpr double b1 = 0.319381530;
  constexpr double b2 = -0.356563782;
  constexpr double b3 = 1.781477937;
  constexpr double b4 = -1.821255978;
  constexpr double b5 = 1.330274429;
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  const double z = std::abs(x);
  const double t = 1.0 / (1.0 + p * z);
  const double poly = t * (b1 + t * (b2 + t * (b3 + t * (b4 + t * b5))));
  const double tail = inv_sqrt_2pi * std::exp(-0.5 * z * z) * poly;
  return x >= 0.0 ? 1.0 - tail : tail;
}

double misclassification_prob(double p, double q, double n1, double n2, double mean_distance) {
  require_positive_mass(p, q);
  const double degree = p * n1 + q * n2;
  if (!(degree > 0.0)) throw Error("misclassification_prob: expected degree p n1 + q n2 is zero");
  return standard_normal_cdf(-mean_distance * std::abs(p - q) * std::sqrt(degree) /
                             (2.0 * (p + q)));
}

bool degree_relaxation_constraint(double p, double q, double p_new, double q_new, double n1,
                                  double n2, Regime regime) {
  for (const double v : {p, q, p_new, q_new}) {
    if (!(v > 0.0 && v <= 1.0)) throw Error("edge probabilities must lie in (0, 1]");
  }
  if (regime == Regime::kHomophilic && !(p > q && p_new > q_new)) {
    throw Error("homophilic regime requires p > q and p' > q'");
  }
  if (regime == Regime::kHeterophilic && !(p < q && p_new < q_new)) {
    throw Error("heterophilic regime requires p < q and p' < q'");
  }
  const double sign = regime == Regime::kHomophilic ? 1.0 : -1.0;
  const double lhs = sign * (p_new - q_new) * (p + q) * std::sqrt(p_new * n1 + q_new * n2);
  const double rhs = sign * (p - q) * (p_new + q_new) * std::sqrt(p * n1 + q * n2);
  return lhs > rhs;
}

double imbalanced_boundary(double mu1, double mu2, double sigma, double n1, double n2) {
  if (!(sigma > 0.0)) throw Error("imbalanced_boundary: sigma must be positive");
  if (!(n1 >= 1.0 && n2 >= 1.0)) throw Error("imbalanced_boundary: class counts must be >= 1");
  return (mu1 + mu2) / 2.0 + std::log(n2 / n1) / (2.0 * sigma * sigma);
}

double multiclass_separation(double p, double q, std::size_t num_classes, double mean_distance) {
  if (num_classes < 2) throw Error("multiclass_separation: need at least two classes");
  const double denom = p + static_cast<double>(num_classes - 1) * q;
  if (!(denom > 0.0)) throw Error("multiclass_separation: p + (s - 1) q must be positive");
  return std::abs(p - q) / denom * mean_distance;
}

SimulationEstimate simulate_misclassification(double p, double q, std::size_t n1, std::size_t n2,
                                              const Vector& mu1, const Vector& mu2,
                                              std::size_t samples, std::uint64_t seed) {
  require_positive_mass(p, q);
  if (samples == 0) throw Error("simulate_misclassification: need at least one sample");
  const double degree = p * static_cast<double>(n1) + q * static_cast<double>(n2);
  if (!(degree > 0.0)) throw Error("simulate_misclassification: zero expected degree");
  const double sd = 1.0 / std::sqrt(degree);
  const Vector mean = expected_embedding(0, p, q, mu1, mu2);
  const BoundarySpec boundary = BoundarySpec::from_means(mu1, mu2, p >= q ? +1 : -1);
  CounterRng rng = CounterRng::from_seed(seed, "misclassification-simulation");
  Vector h(mean.size());
  std::size_t wrong = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = mean[k] + sd * rng.normal();
    wrong += classify_by_boundary(h, boundary) != 0;
  }
  SimulationEstimate est;
  est.samples = samples;
  est.rate = static_cast<double>(wrong) / static_cast<double>(samples);
  est.standard_error = std::sqrt(est.rate * (1.0 - est.rate) / static_cast<double>(samples));
  return est;
}

namespace {

void require_binary(const CsbmParams& params) {
  params.validate();
  if (params.num_classes() != 2) throw Error("theory checks use the two-class CSBM");
}

}  // namespace

EmbeddingStatistics embedding_statistics(const CsbmParams& params, std::uint64_t seed) {
  require_binary(params);
  const LabeledGraph g = generate_csbm(params, seed);
  const Matrix h = mean_aggregate(g, g.features());
  const Adjacency adj = Adjacency::build(g);
  const auto labels = g.labels();
  const std::size_t dim = params.feature_dim();

  EmbeddingStatistics st;
  for (auto& m : st.class_mean) m.assign(dim, 0.0);
  for (auto& s : st.class_std) s.assign(dim, 0.0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    if (adj.degree(i) == 0) {
      ++st.excluded_isolated;
      continue;
    }
    const auto c = static_cast<std::size_t>(labels[i]);
    ++st.counted[c];
    const auto row = h.row(i);
    for (std::size_t k = 0; k < dim; ++k) st.class_mean[c][k] += row[k];
  }
  for (std::size_t c = 0; c < 2; ++c) {
    if (st.counted[c] == 0) throw Error("embedding_statistics: a class has no connected nodes");
    for (auto& v : st.class_mean[c]) v /= static_cast<double>(st.counted[c]);
  }
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    if (adj.degree(i) == 0) continue;
    const auto c = static_cast<std::size_t>(labels[i]);
    const auto row = h.row(i);
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = row[k] - st.class_mean[c][k];
      st.class_std[c][k] += d * d;
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    const double denom = static_cast<double>(std::max<std::size_t>(st.counted[c], 2) - 1);
    for (auto& v : st.class_std[c]) v = std::sqrt(v / denom);
  }
  {
    std::array<Vector, 2> mean;
    std::array<std::size_t, 2> count{};
    for (auto& m : mean) m.assign(dim, 0.0);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++count[c];
      for (std::size_t k = 0; k < dim; ++k) mean[c][k] += g.features()(i, k);
    }
    for (std::size_t c = 0; c < 2; ++c) {
      for (auto& v : mean[c]) v /= static_cast<double>(count[c]);
    }
    st.feature_std.assign(dim, 0.0);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = g.features()(i, k) - mean[c][k];
        st.feature_std[k] += d * d;
      }
    }
    for (auto& v : st.feature_std) v = std::sqrt(v / static_cast<double>(g.num_nodes() - 2));
  }
  st.midpoint = midpoint(st.class_mean[0], st.class_mean[1]);
  st.difference.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) st.difference[k] = st.class_mean[0][k] - st.class_mean[1][k];
  const Vector o = direction(params.class_means[0], params.class_means[1]);
  const double dn = norm(st.difference);
  st.cosine_with_direction = dn == 0.0 ? 0.0 : dot(st.difference, o) / dn;
  return st;
}

namespace {

struct RateResult {
  double rate = 0.0;
  std::size_t excluded = 0;
};

RateResult misclassification_rate(const LabeledGraph& g, const BoundarySpec& boundary) {
  const Matrix h = mean_aggregate(g, g.features());
  const Adjacency adj = Adjacency::build(g);
  const auto labels = g.labels();
  std::size_t wrong = 0;
  std::size_t counted = 0;
  RateResult r;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    if (adj.degree(i) == 0) {
      ++r.excluded;
      continue;
    }
    ++counted;
    wrong += classify_by_boundary(h.row(i), boundary) != labels[i];
  }
  r.rate = counted == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(counted);
  return r;
}

}  // namespace

TheoremCheckReport monte_carlo_theorem_check(const CsbmParams& original,
                                             const CsbmParams& transformed, std::size_t trials,
                                             std::uint64_t seed) {
  require_binary(original);
  require_binary(transformed);
  if (original.class_sizes != transformed.class_sizes ||
      original.class_means != transformed.class_means) {
    throw Error("theorem check: the transform may only change p and q");
  }
  if (trials == 0) throw Error("theorem check: need at least one trial");

  TheoremCheckReport report;
  report.p = original.intra_prob;
  report.q = original.inter_prob;
  report.p_new = transformed.intra_prob;
  report.q_new = transformed.inter_prob;
  report.n1 = original.class_sizes[0];
  report.n2 = original.class_sizes[1];
  const auto& mu1 = original.class_means[0];
  const auto& mu2 = original.class_means[1];
  Vector diff(mu1.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = mu1[k] - mu2[k];
  report.mean_distance = norm(diff);

  if (report.p == report.q) throw Error("theorem check: p == q has no regime");
  report.regime = report.p > report.q ? Regime::kHomophilic : Regime::kHeterophilic;
  const bool consistent = report.regime == Regime::kHomophilic ? report.p_new > report.q_new
                                                               : report.p_new < report.q_new;
  if (!consistent) {
    throw Error(std::string("theorem check: transformed parameters leave the ") +
                to_string(report.regime) + " regime");
  }
  const auto n1 = static_cast<double>(report.n1);
  const auto n2 = static_cast<double>(report.n2);
  report.constraint_satisfied = degree_relaxation_constraint(
      report.p, report.q, report.p_new, report.q_new, n1, n2, report.regime);
  report.closed_form_before = misclassification_prob(report.p, report.q, n1, n2, report.mean_distance);
  report.closed_form_after =
      misclassification_prob(report.p_new, report.q_new, n1, n2, report.mean_distance);

  // The classifier stays fixed: its boundary comes from the original graph.
  const BoundarySpec boundary =
      BoundarySpec::from_means(mu1, mu2, report.regime == Regime::kHomophilic ? +1 : -1);
  const auto labels = block_labels(original.class_sizes);
  const std::size_t n = labels.size();
  const CounterRng root = CounterRng::from_seed(seed, "theorem-check");

  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = root.bits_at(t);
    Matrix features = sample_csbm_features(original, trial_seed);
    const LabeledGraph before(
        n, sample_csbm_edges(labels, report.p, report.q, mix64(trial_seed ^ 0x1ULL)), features,
        labels, 2);
    const LabeledGraph after = before.with_edges(
        sample_csbm_edges(labels, report.p_new, report.q_new, mix64(trial_seed ^ 0x2ULL)));
    const RateResult rb = misclassification_rate(before, boundary);
    const RateResult ra = misclassification_rate(after, boundary);
    report.trials.push_back({trial_seed, rb.rate, ra.rate, rb.excluded, ra.excluded});
    report.mean_before += rb.rate;
    report.mean_after += ra.rate;
    report.improved_trials += ra.rate < rb.rate;
  }
  report.mean_before /= static_cast<double>(trials);
  report.mean_after /= static_cast<double>(trials);
  report.mean_difference = report.mean_after - report.mean_before;
  return report;
}

nlohmann::json theorem_report_to_json(const TheoremCheckReport& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"seed", t.seed},
                      {"rate_before", t.rate_before},
                      {"rate_after", t.rate_after},
                      {"excluded_before", t.excluded_before},
                      {"excluded_after", t.excluded_after}});
  }
  return {{"regime", to_string(r.regime)},
          {"p", r.p},
          {"q", r.q},
          {"p_new", r.p_new},
          {"q_new", r.q_new},
          {"n1", r.n1},
          {"n2", r.n2},
          {"mean_distance", r.mean_distance},
          {"constraint_satisfied", r.constraint_satisfied},
          {"closed_form_before", r.closed_form_before},
          {"closed_form_after", r.closed_form_after},
          {"mean_before", r.mean_before},
          {"mean_after", r.mean_after},
          {"mean_difference", r.mean_difference},
          {"improved_trials", r.improved_trials},
          {"num_trials", r.trials.size()},
          {"trials", std::move(trials)}};
}

std::string theorem_report_to_csv(const TheoremCheckReport& r) {
  std::ostringstream out;
  out << "trial,seed,rate_before,rate_after,excluded_before,excluded_after\n";
  for (std::size_t t = 0; t < r.trials.size(); ++t) {
    const auto& tr = r.trials[t];
    out << t << ',' << tr.seed << ',' << format_double(tr.rate_before) << ','
        << format_double(tr.rate_after) << ',' << tr.excluded_before << ',' << tr.excluded_after
        << '\n';
  }
  return out.str();
}

}  // namespace graphost
