#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace safelight::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-parameter first/second moment accumulators. Moments are shaped on the
// first step and must keep matching the parameter list afterwards.
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t timestep = 0;
};

// Bias-corrected Adam update, in place.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state);

}  // namespace safelight::nn
