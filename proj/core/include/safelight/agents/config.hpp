#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace safelight::agents {

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::uint64_t decay_steps = 20000;

  double at(std::uint64_t step) const;
};

struct PpoConfig {
  double clip = 0.2;
  double gae_lambda = 0.95;
  int epochs = 4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  std::size_t minibatch = 64;
  std::size_t rollout_steps = 256;  // decisions collected before each update
  bool normalize_advantages = true;
};

struct AgentConfig {
  double gamma = 0.95;
  EpsilonSchedule epsilon;
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::uint64_t target_sync_steps = 500;
  double target_tau = 1.0;  // 1 = hard copy every target_sync_steps
  std::size_t buffer_capacity = 20000;
  double alpha = 0.6;
  double beta_start = 0.4;
  double beta_end = 1.0;
  std::uint64_t beta_steps = 20000;
  double priority_eps = 1e-3;
  std::size_t warmup = 64;          // transitions before the first update
  std::uint64_t train_every = 1;    // decisions per gradient step
  double reward_scale = 100.0;
  double grad_clip = 0.0;           // global-norm clip; 0 disables
  std::vector<std::size_t> hidden{128, 128};
  std::vector<std::size_t> grid_hidden{256, 128, 128};
  PpoConfig ppo;

  void validate() const;
};

AgentConfig agent_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AgentConfig& c);

}  // namespace safelight::agents
