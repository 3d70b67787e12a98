#include "safelight/agents/config.hpp"

#include <algorithm>

#include "safelight/common/error.hpp"

namespace safelight::agents {

double EpsilonSchedule::at(std::uint64_t step) const {
  if (decay_steps == 0 || step >= decay_steps) return end;
  const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
  return start + (end - start) * frac;
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent.gamma", "must lie in [0,1]");
  for (double e : {epsilon.start, epsilon.end})
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("agent.epsilon", "must lie in [0,1]");
  if (!(lr > 0)) throw ConfigError("agent.lr", "must be positive");
  if (batch_size == 0) throw ConfigError("agent.batch_size", "must be positive");
  if (buffer_capacity < batch_size) throw ConfigError("agent.buffer_capacity", "smaller than the batch");
  if (target_sync_steps == 0) throw ConfigError("agent.target_sync_steps", "must be positive");
  if (!(target_tau > 0.0 && target_tau <= 1.0)) throw ConfigError("agent.target_tau", "must lie in (0,1]");
  if (alpha < 0) throw ConfigError("agent.alpha", "must be >= 0");
  if (beta_start < 0 || beta_end < 0 || beta_start > 1 || beta_end > 1)
    throw ConfigError("agent.beta", "must lie in [0,1]");
  if (!(priority_eps > 0)) throw ConfigError("agent.priority_eps", "must be positive");
  if (train_every == 0) throw ConfigError("agent.train_every", "must be positive");
  if (!(reward_scale > 0)) throw ConfigError("agent.reward_scale", "must be positive");
  if (grad_clip < 0) throw ConfigError("agent.grad_clip", "must be >= 0");
  if (hidden.empty() || grid_hidden.empty()) throw ConfigError("agent.hidden", "need at least one hidden layer");
  if (!(ppo.clip > 0)) throw ConfigError("agent.ppo.clip", "must be positive");
  if (!(ppo.gae_lambda >= 0 && ppo.gae_lambda <= 1)) throw ConfigError("agent.ppo.gae_lambda", "must lie in [0,1]");
  if (ppo.epochs <= 0) throw ConfigError("agent.ppo.epochs", "must be positive");
  if (ppo.minibatch == 0 || ppo.rollout_steps == 0) throw ConfigError("agent.ppo", "batch sizes must be positive");
}

AgentConfig agent_config_from_json(const nlohmann::json& j) {
  AgentConfig c;
  try {
    c.gamma = j.value("gamma", c.gamma);
    if (j.contains("epsilon")) {
      const auto& e = j.at("epsilon");
      c.epsilon.start = e.value("start", c.epsilon.start);
      c.epsilon.end = e.value("end", c.epsilon.end);
      c.epsilon.decay_steps = e.value("decay_steps", c.epsilon.decay_steps);
    }
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.target_sync_steps = j.value("target_sync_steps", c.target_sync_steps);
    c.target_tau = j.value("target_tau", c.target_tau);
    c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
    c.alpha = j.value("alpha", c.alpha);
    c.beta_start = j.value("beta_start", c.beta_start);
    c.beta_end = j.value("beta_end", c.beta_end);
    c.beta_steps = j.value("beta_steps", c.beta_steps);
    c.priority_eps = j.value("priority_eps", c.priority_eps);
    c.warmup = j.value("warmup", c.warmup);
    c.train_every = j.value("train_every", c.train_every);
    c.reward_scale = j.value("reward_scale", c.reward_scale);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    if (j.contains("grid_hidden")) c.grid_hidden = j.at("grid_hidden").get<std::vector<std::size_t>>();
    if (j.contains("ppo")) {
      const auto& p = j.at("ppo");
      c.ppo.clip = p.value("clip", c.ppo.clip);
      c.ppo.gae_lambda = p.value("gae_lambda", c.ppo.gae_lambda);
      c.ppo.epochs = p.value("epochs", c.ppo.epochs);
      c.ppo.entropy_coef = p.value("entropy_coef", c.ppo.entropy_coef);
      c.ppo.value_coef = p.value("value_coef", c.ppo.value_coef);
      c.ppo.minibatch = p.value("minibatch", c.ppo.minibatch);
      c.ppo.rollout_steps = p.value("rollout_steps", c.ppo.rollout_steps);
      c.ppo.normalize_advantages = p.value("normalize_advantages", c.ppo.normalize_advantages);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("agent", e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const AgentConfig& c) {
  return {{"gamma", c.gamma},
          {"epsilon", {{"start", c.epsilon.start}, {"end", c.epsilon.end}, {"decay_steps", c.epsilon.decay_steps}}},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"target_sync_steps", c.target_sync_steps},
          {"target_tau", c.target_tau},
          {"buffer_capacity", c.buffer_capacity},
          {"alpha", c.alpha},
          {"beta_start", c.beta_start},
          {"beta_end", c.beta_end},
          {"beta_steps", c.beta_steps},
          {"priority_eps", c.priority_eps},
          {"warmup", c.warmup},
          {"train_every", c.train_every},
          {"reward_scale", c.reward_scale},
          {"grad_clip", c.grad_clip},
          {"hidden", c.hidden},
          {"grid_hidden", c.grid_hidden},
          {"ppo",
           {{"clip", c.ppo.clip},
            {"gae_lambda", c.ppo.gae_lambda},
            {"epochs", c.ppo.epochs},
            {"entropy_coef", c.ppo.entropy_coef},
            {"value_coef", c.ppo.value_coef},
            {"minibatch", c.ppo.minibatch},
            {"rollout_steps", c.ppo.rollout_steps},
            {"normalize_advantages", c.ppo.normalize_advantages}}}};
}

}  // namespace safelight::agents
