#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "safelight/agents/config.hpp"
#include "safelight/common/rng.hpp"
#include "safelight/nn/adam.hpp"
#include "safelight/nn/checkpoint.hpp"
#include "safelight/nn/mlp.hpp"

namespace safelight::agents {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// Generalized advantage estimation over one contiguous segment. `bootstrap`
// is V(s_T) for a truncated segment and is ignored when `terminal`.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double bootstrap,
                      bool terminal, double gamma, double lambda);

struct ActorBatch {
  nn::Matrix logits;                   // n x actions
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<std::vector<bool>> unsafe;  // per-sample unsafe mask, may be empty
};

struct LossAndGrad {
  double loss = 0.0;
  double kl = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  nn::Matrix grad;  // d loss / d input (logits or values)
};

// -mean(min(r A, clip(r) A)) - entropy_coef * mean(H) + lambda2 * mean KL(Â || pi)
// where the KL mean runs over the whole batch with zero for safe samples.
LossAndGrad ppo_actor_loss(const ActorBatch& batch, double clip, double entropy_coef, double lambda2);

// value_coef * mean((v - returns)^2)
LossAndGrad ppo_critic_loss(const nn::Matrix& values, std::span<const double> returns, double value_coef);

struct PpoStep {
  std::vector<double> state;
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  std::vector<bool> unsafe;
};

struct PpoDecision {
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
  std::vector<double> logits;
};

struct PpoUpdateStats {
  bool trained = false;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double kl = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  std::size_t samples = 0;
  std::size_t minibatches = 0;
  // Minibatches in which no executed action was flagged unsafe, and the
  // largest KL term seen in one of them.
  std::size_t safe_minibatches = 0;
  double max_safe_minibatch_kl = 0.0;
};

class PpoAgent {
 public:
  PpoAgent(std::size_t state_dim, std::size_t actions, const std::vector<std::size_t>& hidden,
           const AgentConfig& config, std::uint64_t seed);

  PpoDecision act(std::span<const double> state);
  int greedy_action(std::span<const double> state) const;
  std::vector<double> logits(std::span<const double> state) const { return actor_.forward(state); }
  double value(std::span<const double> state) const { return critic_.forward(state).front(); }

  void record(PpoStep step);
  // Closes the open segment. For a truncated segment the value of the state
  // after the last step bootstraps the return.
  void end_segment(double bootstrap_value, bool terminal);
  bool ready() const { return rollout_size() >= config_.ppo.rollout_steps; }
  std::size_t rollout_size() const;
  // Closed plus open steps.
  std::size_t buffered_steps() const { return rollout_size() + open_.size(); }
  PpoUpdateStats update(double lambda2);

  const nn::Mlp& actor() const { return actor_; }
  const nn::Mlp& critic() const { return critic_; }
  nn::Mlp& actor() { return actor_; }
  nn::Mlp& critic() { return critic_; }
  const AgentConfig& config() const { return config_; }
  std::uint64_t updates() const { return updates_; }
  std::uint64_t decisions() const { return decisions_; }

  void store(nn::Checkpoint& ckpt, const std::string& prefix) const;
  void restore(const nn::Checkpoint& ckpt, const std::string& prefix);

 private:
  struct Segment {
    std::vector<PpoStep> steps;
    std::vector<double> advantages;
    std::vector<double> returns;
  };

  AgentConfig config_;
  Rng rng_;
  nn::Mlp actor_;
  nn::Mlp critic_;
  nn::AdamState actor_adam_;
  nn::AdamState critic_adam_;
  std::vector<Segment> closed_;
  std::vector<PpoStep> open_;
  std::uint64_t updates_ = 0;
  std::uint64_t decisions_ = 0;
};

double log_softmax_at(std::span<const double> logits, int action);
int sample_categorical(std::span<const double> probs, Rng& rng);

}  // namespace safelight::agents
