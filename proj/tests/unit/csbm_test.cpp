#include <cmath>

#include <gtest/gtest.h>

#include "graphost/csbm.hpp"
#include "graphost/error.hpp"

using namespace graphost;

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

struct Summary {
  double mean = 0.0;
  double standard_error = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
  double sum = 0.0;
  for (const double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

CsbmParams three_class(double p, double q, std::size_t n) {
  CsbmParams params;
  params.class_means = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, -1.0}};
  params.class_sizes = {n, n, n};
  params.intra_prob = p;
  params.inter_prob = q;
  return params;
}

}  // namespace

TEST(CsbmParams, BinaryMeansAreSeparatedByRequestedDistance) {
  const CsbmParams p = make_binary_csbm(10, 12, 0.1, 0.01, 16, 2.0);
  double d2 = 0.0;
  for (std::size_t k = 0; k < 16; ++k) {
    const double d = p.class_means[0][k] - p.class_means[1][k];
    d2 += d * d;
  }
  EXPECT_NEAR(std::sqrt(d2), 2.0, 1e-12);
  EXPECT_EQ(p.num_nodes(), 22u);
  EXPECT_EQ(p.feature_dim(), 16u);
}

TEST(CsbmParams, ValidationRejectsBrokenInvariants) {
  CsbmParams p = make_binary_csbm(3, 3, 0.5, 0.5, 2, 1.0);
  EXPECT_NO_THROW(p.validate());

  CsbmParams same_means = p;
  same_means.class_means[1] = same_means.class_means[0];
  EXPECT_THROW(same_means.validate(), Error);

  CsbmParams one_class = p;
  one_class.class_sizes = {3};
  one_class.class_means = {{0.0, 0.0}};
  EXPECT_THROW(one_class.validate(), Error);

  CsbmParams empty_block = p;
  empty_block.class_sizes = {3, 0};
  EXPECT_THROW(empty_block.validate(), Error);

  CsbmParams bad_prob = p;
  bad_prob.inter_prob = 1.5;
  EXPECT_THROW(bad_prob.validate(), Error);

  CsbmParams ragged = p;
  ragged.class_means[1] = {1.0};
  EXPECT_THROW(ragged.validate(), Error);
}

TEST(CsbmParams, JsonRoundTrip) {
  const CsbmParams p = three_class(0.3, 0.05, 4);
  const nlohmann::json j = p;
  EXPECT_EQ(j.get<CsbmParams>(), p);
}

TEST(GenerateCsbm, CertainIntraAndNoInterGivesTwoCliques) {
  const LabeledGraph g = generate_csbm(make_binary_csbm(3, 3, 1.0, 0.0, 4, 2.0), 0);
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}}));
  EXPECT_EQ(std::vector<int>(g.labels().begin(), g.labels().end()),
            (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(GenerateCsbm, RequiresExactlyTwoClasses) {
  EXPECT_THROW(generate_csbm(three_class(0.5, 0.5, 2), 0), Error);
}

TEST(GenerateCsbm, SameSeedGivesSameGraph) {
  const CsbmParams p = make_binary_csbm(40, 40, 0.1, 0.02, 8, 2.0);
  EXPECT_EQ(generate_csbm(p, 5), generate_csbm(p, 5));
  EXPECT_NE(generate_csbm(p, 5), generate_csbm(p, 6));
}

TEST(GenerateCsbm, NodeFeaturesDoNotDependOnOtherBlockSizes) {
  const Matrix small = sample_csbm_features(make_binary_csbm(5, 5, 0.1, 0.1, 3, 2.0), 8);
  const Matrix large = sample_csbm_features(make_binary_csbm(5, 50, 0.1, 0.1, 3, 2.0), 8);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(small(i, k), large(i, k));
  }
}

TEST(GenerateCsbm, IntraEdgeCountMatchesExpectation) {
  const CsbmParams p = make_binary_csbm(500, 500, 0.02, 0.01, 2, 2.0);
  std::vector<double> counts;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LabeledGraph g = generate_csbm(p, seed);
    double intra = 0.0;
    for (const auto& e : g.edges()) intra += g.labels()[e.u] == g.labels()[e.v] ? 1.0 : 0.0;
    counts.push_back(intra);
  }
  const Summary s = summarize(counts);
  EXPECT_NEAR(s.mean, 0.02 * 2.0 * choose2(500), 3.0 * s.standard_error);
}

TEST(GenerateCsbm, EqualProbabilitiesGivePairTypeHomophily) {
  const CsbmParams p = make_binary_csbm(100, 60, 0.1, 0.1, 2, 2.0);
  std::vector<double> hds;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    hds.push_back(edge_homophily_degree(generate_csbm(p, seed)));
  }
  const Summary s = summarize(hds);
  EXPECT_NEAR(s.mean, (choose2(100) + choose2(60)) / choose2(160), 3.0 * s.standard_error);
}

TEST(GenerateCsbm, HomophilyMatchesExpectationForUnequalProbabilities) {
  const CsbmParams p = make_binary_csbm(80, 120, 0.08, 0.02, 2, 2.0);
  std::vector<double> hds;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    hds.push_back(edge_homophily_degree(generate_csbm(p, seed)));
  }
  const double intra = 0.08 * (choose2(80) + choose2(120));
  const double inter = 0.02 * 80.0 * 120.0;
  const Summary s = summarize(hds);
  // HD is a ratio, so its mean carries an O(1/|E|) bias well below 3 SE here.
  EXPECT_NEAR(s.mean, intra / (intra + inter), 3.0 * s.standard_error);
}

TEST(GenerateCsbm, ClassFeatureMeansConvergeToMu) {
  const std::size_t l = 16, n = 600;
  const CsbmParams p = make_binary_csbm(n, n, 0.0, 0.0, l, 3.0);
  const LabeledGraph g = generate_csbm(p, 21);
  for (int k = 0; k < 2; ++k) {
    double err2 = 0.0;
    for (std::size_t d = 0; d < l; ++d) {
      double sum = 0.0;
      for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        if (g.labels()[i] == k) sum += g.features()(i, d);
      }
      const double diff = sum / static_cast<double>(n) - p.class_means[k][d];
      err2 += diff * diff;
    }
    EXPECT_LE(std::sqrt(err2), 4.0 * std::sqrt(static_cast<double>(l) / n)) << "class " << k;
  }
}

TEST(GenerateCsbmMulticlass, TwoClassesMatchBinaryGenerator) {
  const CsbmParams p = make_binary_csbm(30, 25, 0.2, 0.05, 4, 2.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_EQ(generate_csbm_multiclass(p, seed), generate_csbm(p, seed));
  }
}

TEST(GenerateCsbmMulticlass, CertainIntraGivesDisjointBlocks) {
  const LabeledGraph g = generate_csbm_multiclass(three_class(1.0, 0.0, 2), 3);
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {2, 3}, {4, 5}}));
  EXPECT_EQ(g.num_classes(), 3);
}

TEST(GenerateCsbmMulticlass, CertainInterGivesCompleteTripartiteGraph) {
  const LabeledGraph g = generate_csbm_multiclass(three_class(0.0, 1.0, 2), 3);
  EXPECT_EQ(g.num_edges(), 12u);
  for (const auto& e : g.edges()) EXPECT_NE(g.labels()[e.u], g.labels()[e.v]);
}

TEST(FeatureNoise, AddsVarianceWithoutTouchingStructure) {
  const LabeledGraph g = generate_csbm(make_binary_csbm(300, 300, 0.01, 0.01, 4, 2.0), 1);
  const LabeledGraph noisy = add_feature_noise(g, 0.25, 2);
  EXPECT_EQ(noisy.edges(), g.edges());
  EXPECT_EQ(noisy, add_feature_noise(g, 0.25, 2));
  double ss = 0.0;
  for (std::size_t i = 0; i < g.features().size(); ++i) {
    const double d = noisy.features().values()[i] - g.features().values()[i];
    ss += d * d;
  }
  EXPECT_NEAR(ss / static_cast<double>(g.features().size()), 0.25, 0.02);
}
