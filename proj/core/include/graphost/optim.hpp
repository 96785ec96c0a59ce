#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace graphost {

struct AdamConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates for one parameter tensor. Single owner; never share a
/// state between concurrently trained models.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;

  AdamState() = default;
  AdamState(std::size_t num_params, AdamConfig cfg)
      : config(cfg), first_moment(num_params, 0.0), second_moment(num_params, 0.0) {}
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace graphost
