#include <cmath>

#include <gtest/gtest.h>

#include "graphost/error.hpp"
#include "graphost/optim.hpp"

using namespace graphost;

TEST(Adam, ZeroGradientLeavesParametersAndAdvancesStep) {
  std::vector<double> params{1.0, -2.0};
  AdamState state(2, AdamConfig{});
  adam_step(params, std::vector<double>{0.0, 0.0}, state);
  EXPECT_EQ(params, (std::vector<double>{1.0, -2.0}));
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> x{3.0};
  AdamState state(1, AdamConfig{.learning_rate = 0.1});
  adam_step(x, std::vector<double>{1.0}, state);
  EXPECT_NEAR(x[0], 3.0 - 0.1, 1e-8);
}

TEST(Adam, IdenticalRunsAreBitIdentical) {
  const auto run = [] {
    std::vector<double> x{0.5, -0.25, 2.0};
    AdamState state(3, AdamConfig{.learning_rate = 0.01});
    for (int t = 0; t < 100; ++t) {
      std::vector<double> g{2 * x[0], std::sin(x[1]), x[2] - 1.0};
      adam_step(x, g, state);
    }
    return x;
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, MinimisesAQuadratic) {
  std::vector<double> x{5.0};
  AdamState state(1, AdamConfig{.learning_rate = 0.1});
  for (int t = 0; t < 2000; ++t) adam_step(x, std::vector<double>{2.0 * (x[0] - 1.0)}, state);
  EXPECT_NEAR(x[0], 1.0, 1e-3);
}

TEST(Adam, RejectsShapeMismatch) {
  std::vector<double> x{1.0, 2.0};
  AdamState state(2, AdamConfig{});
  EXPECT_THROW(adam_step(x, std::vector<double>{1.0}, state), Error);
  AdamState wrong(3, AdamConfig{});
  EXPECT_THROW(adam_step(x, std::vector<double>{1.0, 1.0}, wrong), Error);
}
