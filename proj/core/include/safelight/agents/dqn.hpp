#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "safelight/agents/config.hpp"
#include "safelight/agents/dueling.hpp"
#include "safelight/agents/replay.hpp"
#include "safelight/common/rng.hpp"
#include "safelight/nn/adam.hpp"
#include "safelight/nn/checkpoint.hpp"

namespace safelight::agents {

// Lowest index wins ties.
int argmax(std::span<const double> values);

// r + gamma * Q_target(s', argmax_a' Q_online(s', a')), or r when terminal.
double double_q_value(double reward, bool terminal, double gamma, std::span<const double> online_next_q,
                      std::span<const double> target_next_q);

std::vector<double> double_q_target(const std::vector<const Transition*>& batch, const DuelingQNetwork& online,
                                    const DuelingQNetwork& target, double gamma);

// Loss weights of the first (TD) and second (KL to the safe distribution) term.
struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
};

struct DqnTrainStats {
  bool trained = false;
  double loss = 0.0;
  double mse = 0.0;  // importance-weighted mean squared TD error
  double kl = 0.0;   // batch mean of KL(Â || softmax(A)), 0 for safe samples
  bool all_safe = true;
  std::size_t unsafe_samples = 0;
};

// Loss and gradients for one sampled batch; exposed so tests can probe it
// against scalar and finite-difference oracles.
struct BatchLoss {
  double loss = 0.0;
  double mse = 0.0;
  double kl = 0.0;
  bool all_safe = true;
  std::size_t unsafe_samples = 0;
  std::vector<double> td_errors;
  DuelingGradients grads;
};

BatchLoss dqn_batch_loss(const DuelingQNetwork& online, const std::vector<const Transition*>& batch,
                         std::span<const double> targets, std::span<const double> weights, const LossWeights& w);

class DqnAgent {
 public:
  DqnAgent(std::size_t base_dim, std::size_t actions, const std::vector<std::size_t>& hidden, std::size_t embed_dim,
           const AgentConfig& config, std::uint64_t seed);

  int select_action(std::span<const double> state, double epsilon);
  int greedy_action(std::span<const double> state) const;
  std::vector<double> q_values(std::span<const double> state) const { return online_.q_values(state); }
  std::vector<double> advantages(std::span<const double> state) const { return online_.advantages(state); }
  // softmax(A(s, .)); its argmax equals argmax Q(s, .).
  std::vector<double> advantage_distribution(std::span<const double> state) const;

  void remember(Transition t);
  DqnTrainStats train_step(const LossWeights& w);

  double beta() const;
  double epsilon() const { return config_.epsilon.at(decisions_); }
  void count_decision() { ++decisions_; }
  std::uint64_t decisions() const { return decisions_; }
  std::uint64_t train_steps() const { return steps_; }

  const DuelingQNetwork& online() const { return online_; }
  DuelingQNetwork& online() { return online_; }
  const DuelingQNetwork& target() const { return target_; }
  const PrioritizedReplayBuffer& buffer() const { return buffer_; }
  const AgentConfig& config() const { return config_; }
  Rng& rng() { return rng_; }

  void store(nn::Checkpoint& ckpt, const std::string& prefix) const;
  // Restores networks, optimizer and counters; the replay buffer is not saved.
  void restore(const nn::Checkpoint& ckpt, const std::string& prefix);

 private:
  AgentConfig config_;
  Rng rng_;
  DuelingQNetwork online_;
  DuelingQNetwork target_;
  PrioritizedReplayBuffer buffer_;
  nn::AdamState adam_;
  std::uint64_t steps_ = 0;
  std::uint64_t decisions_ = 0;
};

void store_network(nn::Checkpoint& ckpt, const std::string& prefix, const DuelingQNetwork& net);
DuelingQNetwork load_network(const nn::Checkpoint& ckpt, const std::string& prefix, std::size_t base_dim,
                             std::size_t actions);

}  // namespace safelight::agents
