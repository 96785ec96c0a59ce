#include <cmath>

#include <gtest/gtest.h>

#include "graphost/error.hpp"
#include "graphost/models.hpp"
#include "graphost/nn.hpp"
#include "graphost/rng.hpp"
#include "oracles.hpp"

using namespace graphost;

namespace {

constexpr double kGradTolerance = 1e-4;

Matrix random_matrix(std::size_t r, std::size_t c, CounterRng& rng) {
  Matrix m(r, c);
  for (auto& v : m.values()) v = rng.normal();
  return m;
}

LabeledGraph random_graph(std::size_t n, std::size_t dim, int classes, CounterRng& rng) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.uniform() < 0.5) edges.push_back({u, v});
    }
  }
  std::vector<int> labels(n);
  for (auto& y : labels) y = static_cast<int>(rng.uniform_index(classes));
  return LabeledGraph(n, edges, random_matrix(n, dim, rng), labels, classes);
}

LabeledGraph star() {
  // Center 0, leaves 1 and 2; node 3 isolated.
  return LabeledGraph(4, {{0, 1}, {0, 2}}, Matrix{{9, 9}, {2, 0}, {0, 2}, {5, 5}}, std::nullopt, 2);
}

}  // namespace

TEST(MeanAggregate, StarCenterAveragesLeaves) {
  const LabeledGraph g = star();
  const Matrix h = mean_aggregate(g, g.features());
  EXPECT_EQ(h(0, 0), 1.0);
  EXPECT_EQ(h(0, 1), 1.0);
  EXPECT_EQ(h(1, 0), 9.0);  // a leaf sees only the center
}

TEST(MeanAggregate, IsolatedNodeKeepsOwnFeature) {
  const LabeledGraph g = star();
  const Matrix h = mean_aggregate(g, g.features());
  EXPECT_EQ(h(3, 0), 5.0);
  EXPECT_EQ(h(3, 1), 5.0);
}

TEST(MeanAggregate, ZeroIncidentWeightCountsAsIsolated) {
  const LabeledGraph g = star();
  const std::vector<double> w{0.0, 0.0};
  const Matrix h = mean_aggregate(g, g.features(), w);
  EXPECT_EQ(h(0, 0), 9.0);
  EXPECT_EQ(h(1, 1), 0.0);
}

TEST(MeanAggregate, UnitWeightsEqualUnweightedBitwise) {
  CounterRng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const LabeledGraph g = random_graph(12, 3, 2, rng);
    const std::vector<double> ones(g.num_edges(), 1.0);
    EXPECT_EQ(mean_aggregate(g, g.features(), ones), mean_aggregate(g, g.features()));
  }
}

TEST(MeanAggregate, RejectsMisalignedInputs) {
  const LabeledGraph g = star();
  EXPECT_THROW(mean_aggregate(g, Matrix(3, 2)), Error);
  EXPECT_THROW(mean_aggregate(g, g.features(), std::vector<double>{1.0}), Error);
}

TEST(GcnLayer, IdentityParametersWithSumAggregationSumOverClosedNeighbourhood) {
  const LabeledGraph g = star();
  const std::vector<double> bias(2, 0.0);
  const Matrix h = gcn_layer_forward(g, g.features(), Matrix::identity(2), bias, {},
                                     Activation::kIdentity, Aggregation::kSum);
  EXPECT_EQ(h, (Matrix{{11, 11}, {11, 9}, {9, 11}, {5, 5}}));
}

TEST(GcnLayer, IdentityParametersWithWeightedMeanAverageClosedNeighbourhood) {
  const LabeledGraph g = star();
  const std::vector<double> bias(2, 0.0);
  const Matrix h = gcn_layer_forward(g, g.features(), Matrix::identity(2), bias, {},
                                     Activation::kIdentity);
  EXPECT_NEAR(h(0, 0), 11.0 / 3.0, 1e-12);
  EXPECT_NEAR(h(1, 1), 4.5, 1e-12);
  EXPECT_EQ(h(3, 0), 5.0);
}

TEST(GcnLayer, ZeroWeightEdgeSeversMessages) {
  const LabeledGraph g(2, {{0, 1}}, Matrix{{1, 2}, {30, 40}}, std::nullopt, 2);
  const Matrix w{{0.5, -1.0}, {2.0, 0.25}};
  const std::vector<double> bias{0.1, -0.2};
  for (const auto agg : {Aggregation::kWeightedMean, Aggregation::kSum}) {
    const Matrix joined = gcn_layer_forward(g, g.features(), w, bias, std::vector<double>{0.0},
                                            Activation::kRelu, agg);
    const LabeledGraph apart = g.with_edges({});
    EXPECT_EQ(joined, gcn_layer_forward(apart, apart.features(), w, bias, {}, Activation::kRelu,
                                        agg));
  }
}

TEST(GcnLayer, ReluClampsNegatives) {
  const LabeledGraph g(1, {}, Matrix{{-1.0, 2.0}}, std::nullopt, 2);
  const std::vector<double> bias(2, 0.0);
  const Matrix h = gcn_layer_forward(g, g.features(), Matrix::identity(2), bias, {},
                                     Activation::kRelu);
  EXPECT_EQ(h, (Matrix{{0.0, 2.0}}));
}

TEST(GcnLayer, RejectsShapeMismatch) {
  const LabeledGraph g = star();
  EXPECT_THROW(gcn_layer_forward(g, g.features(), Matrix(3, 2), std::vector<double>(2, 0.0), {},
                                 Activation::kIdentity),
               Error);
}

TEST(GcnLayer, WeightGradientMatchesFiniteDifferencesOnFiveNodeGraphs) {
  CounterRng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const LabeledGraph g = random_graph(5, 3, 2, rng);
    const auto spec = ArchitectureSpec::make(ModelKind::kGcn, 3, 2, 2, 4);  // 26 parameters
    Checkpoint ckpt = initialize_checkpoint(ModelRole::kClassifier, spec, trial);
    std::vector<DenseLayer> grads;
    classifier_objective(ckpt, g, &grads);
    const auto numeric = oracle::numeric_gradient(
        [&](std::span<const double> x) {
          Checkpoint probe = ckpt;
          oracle::unflatten(x, probe.layers);
          return classifier_objective(probe, g);
        },
        oracle::flatten(ckpt.layers));
    EXPECT_LE(oracle::relative_error(oracle::flatten(grads), numeric), kGradTolerance)
        << "trial " << trial;
  }
}

TEST(Losses, WbceHandExample) {
  const std::vector<double> p{0.5};
  const std::vector<int> y{1};
  EXPECT_NEAR(wbce_loss(p, y, 0.3).value, -0.3 * std::log(0.5), 1e-15);
  EXPECT_NEAR(wbce_loss(p, y, 0.3).value, 0.20794, 1e-5);
}

TEST(Losses, HalfWeightWbceIsHalfBceExactly) {
  CounterRng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(10);
    std::vector<int> y(10);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = rng.uniform();
      y[i] = static_cast<int>(rng.uniform_index(2));
    }
    const auto w = wbce_loss(p, y, 0.5);
    const auto b = bce_loss(p, y);
    EXPECT_EQ(w.value, 0.5 * b.value);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(w.gradient[i], 0.5 * b.gradient[i]);
  }
}

TEST(Losses, ExtremePredictionsAreClamped) {
  const std::vector<double> p{0.0, 1.0};
  const std::vector<int> y{1, 0};
  const auto l = bce_loss(p, y);
  EXPECT_TRUE(std::isfinite(l.value));
  EXPECT_NEAR(l.value, -2.0 * std::log(kProbabilityEpsilon), 1e-9);
}

TEST(Losses, RejectBadInputs) {
  const std::vector<double> p{0.5, 0.5};
  EXPECT_THROW(bce_loss(p, std::vector<int>{1}), Error);
  EXPECT_THROW(bce_loss(p, std::vector<int>{1, 2}), Error);
  EXPECT_THROW(wbce_loss(p, std::vector<int>{1, 0}, 1.5), Error);
  EXPECT_THROW(bce_loss(std::vector<double>{std::nan(""), 0.5}, std::vector<int>{1, 0}), Error);
  EXPECT_THROW(cross_entropy_loss(Matrix{{1, 2}}, std::vector<int>{2}), Error);
}

TEST(Losses, BinaryGradientsMatchFiniteDifferences) {
  CounterRng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(20);
    std::vector<double> p(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = 0.05 + 0.9 * rng.uniform();
      y[i] = static_cast<int>(rng.uniform_index(2));
    }
    const double alpha = rng.uniform();
    const auto numeric_w = oracle::numeric_gradient(
        [&](std::span<const double> x) { return wbce_loss(x, y, alpha).value; }, p);
    EXPECT_LE(oracle::relative_error(wbce_loss(p, y, alpha).gradient, numeric_w), kGradTolerance);
    const auto numeric_b = oracle::numeric_gradient(
        [&](std::span<const double> x) { return bce_loss(x, y).value; }, p);
    EXPECT_LE(oracle::relative_error(bce_loss(p, y).gradient, numeric_b), kGradTolerance);
  }
}

TEST(Losses, CrossEntropyGradientMatchesFiniteDifferences) {
  CounterRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 1 + rng.uniform_index(6), cols = 2 + rng.uniform_index(3);
    const Matrix logits = random_matrix(rows, cols, rng);
    std::vector<int> y(rows);
    for (auto& v : y) v = static_cast<int>(rng.uniform_index(cols));
    const auto numeric = oracle::numeric_gradient(
        [&](std::span<const double> x) {
          return cross_entropy_loss(Matrix(rows, cols, std::vector<double>(x.begin(), x.end())), y)
              .value;
        },
        logits.data());
    EXPECT_LE(oracle::relative_error(cross_entropy_loss(logits, y).gradient.values(), numeric),
              kGradTolerance);
  }
}

TEST(Softmax, UniformLogitsGiveUniformRow) {
  const Matrix p = softmax_rows(Matrix{{0, 0, 0}});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(p(0, k), 1.0 / 3.0, 1e-15);
}

TEST(Softmax, RowsArePositiveAndSumToOne) {
  CounterRng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix logits = random_matrix(4, 5, rng);
    for (auto& v : logits.values()) v *= 30.0;
    const Matrix p = softmax_rows(logits);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      double sum = 0.0;
      for (const double v : p.row(r)) {
        EXPECT_GE(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Softmax, RejectsNonFiniteInput) {
  EXPECT_THROW(softmax_rows(Matrix{{1.0, INFINITY}}), Error);
}

TEST(Sigmoid, KnownValues) {
  EXPECT_NEAR(sigmoid(1.0), 0.731059, 1e-6);
  EXPECT_NEAR(sigmoid(-1.0), 0.268941, 1e-6);
  EXPECT_EQ(sigmoid(0.0), 0.5);
}

TEST(Cosine, SelfOrthogonalZeroAndSymmetry) {
  const std::vector<double> z{1.0, -2.0, 0.5}, o{2.0, 1.0, 0.0}, zero{0.0, 0.0, 0.0};
  EXPECT_NEAR(cosine_similarity(z, z), 1.0, 1e-15);
  EXPECT_EQ(cosine_similarity(z, o), 0.0);
  EXPECT_EQ(cosine_similarity(z, zero), 0.0);
  EXPECT_EQ(cosine_similarity(z, o), cosine_similarity(o, z));
  EXPECT_THROW(cosine_similarity(z, std::vector<double>{1.0}), Error);
  EXPECT_THROW(cosine_similarity(z, std::vector<double>{NAN, 0.0, 0.0}), Error);
}

TEST(Cosine, GradientMatchesFiniteDifferences) {
  CounterRng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.uniform_index(8);  // cos is constant in one dimension
    std::vector<double> uv(2 * d);
    for (auto& v : uv) v = rng.normal();
    const auto f = [d](std::span<const double> x) {
      return cosine_similarity(x.subspan(0, d), x.subspan(d, d));
    };
    std::vector<double> grad(2 * d, 0.0);
    cosine_similarity_backward(std::span(uv).subspan(0, d), std::span(uv).subspan(d, d), 1.0,
                               std::span(grad).subspan(0, d), std::span(grad).subspan(d, d));
    EXPECT_LE(oracle::relative_error(grad, oracle::numeric_gradient(f, uv)), kGradTolerance);
  }
}
