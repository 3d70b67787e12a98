#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "safelight/agents/dqn.hpp"
#include "safelight/agents/ppo.hpp"
#include "safelight/harness/run_config.hpp"
#include "safelight/nn/checkpoint.hpp"
#include "safelight/safety/safety_model.hpp"
#include "safelight/sim/collision.hpp"
#include "safelight/sim/event_log.hpp"
#include "safelight/sim/metrics.hpp"

namespace safelight::harness {

// One decision waiting for its outcome.
struct PendingDecision {
  std::vector<double> state;      // network input
  safety::SafetyVerdict verdict;  // at decision time
  int action = 0;                 // executed action index
  std::vector<double> prefs;      // advantages (dqn) or logits (ppo) at decision time
  double log_prob = 0.0;
  double value = 0.0;
  double waiting_s = 0.0;         // vehicle-seconds stopped since the decision
  std::size_t collisions = 0;
  bool intervened = false;
};

struct LearnStats {
  std::size_t batches = 0;
  std::size_t safe_batches = 0;
  double max_safe_batch_kl = 0.0;  // largest KL term over all-safe batches
  double kl_sum = 0.0;
  double loss_sum = 0.0;
  void merge(const LearnStats& o);
};

// The trainable side of a run: one or two DQN agents or a PPO agent, plus the
// variant-specific reward and loss wiring.
class Learner {
 public:
  Learner(const RunConfig& cfg, std::size_t base_dim, std::size_t actions);

  std::size_t base_dim() const { return base_dim_; }
  std::size_t actions() const { return actions_; }
  std::vector<double> network_input(std::span<const double> base, const safety::SafetyVerdict& v) const;

  // Fills action/prefs/log_prob/value of `d` from d.state.
  void choose(PendingDecision& d, bool explore);
  // Variant reward of a finished decision window, in seconds.
  double reward(const PendingDecision& d) const;
  void learn(const PendingDecision& d, std::span<const double> next_state, bool terminal, LearnStats& stats);
  void end_episode(std::span<const double> next_state, LearnStats& stats);

  double epsilon() const;

  void store(nn::Checkpoint& ckpt) const;
  void restore(const nn::Checkpoint& ckpt);

  agents::DqnAgent* dqn() { return dqn_.get(); }
  agents::DqnAgent* safety_head() { return safety_.get(); }
  agents::PpoAgent* ppo() { return ppo_.get(); }

 private:
  void ppo_update(LearnStats& stats);

  RunConfig cfg_;
  std::size_t base_dim_;
  std::size_t actions_;
  std::unique_ptr<agents::DqnAgent> dqn_;
  std::unique_ptr<agents::DqnAgent> safety_;
  std::unique_ptr<agents::PpoAgent> ppo_;
};

std::size_t base_state_length(const RunConfig& cfg);
std::unique_ptr<Learner> make_learner(const RunConfig& cfg);

struct EpisodeOptions {
  bool train = false;
  bool explore = false;
  sim::EventLog* log = nullptr;
};

struct EpisodeOutcome {
  sim::EpisodeReport report;
  double cumulative_reward = 0.0;  // sum of variant rewards, seconds
  std::size_t decisions = 0;
  std::size_t intervened_decisions = 0;
  std::size_t unsafe_proposals = 0;
  std::uint64_t override_ticks = 0;
  std::uint64_t flagged_permitted_ticks = 0;  // flagged movement shown permitted green
  std::uint64_t change_interval_collisions = 0;
  std::vector<sim::CollisionEvent> collisions;
  double epsilon = 0.0;
  LearnStats learn;
};

// `learner` may be null only for the fixed-time variant.
EpisodeOutcome run_episode(const RunConfig& cfg, Learner* learner, std::uint64_t seed, int episode_index,
                           const EpisodeOptions& opt);

}  // namespace safelight::harness
