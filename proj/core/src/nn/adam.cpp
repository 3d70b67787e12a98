#include "safelight/nn/adam.hpp"

#include <cmath>

#include "safelight/common/error.hpp"

namespace safelight::nn {

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state) {
  if (params.size() != grads.size())
    throw DimensionError("adam_step tensor count", params.size(), grads.size());
  if (state.timestep == 0 && state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size())
    throw DimensionError("adam_step moment count", state.first_moment.size(), params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].size() != params[k].size())
      throw DimensionError("adam_step gradient " + std::to_string(k), params[k].size(), grads[k].size());
    if (state.first_moment[k].size() != params[k].size())
      throw DimensionError("adam_step moment " + std::to_string(k), state.first_moment[k].size(),
                           params[k].size());
  }

  const auto& c = state.config;
  state.timestep += 1;
  const double t = static_cast<double>(state.timestep);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    const auto g = grads[k];
    auto p = params[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

}  // namespace safelight::nn
