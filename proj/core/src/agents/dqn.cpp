#include "safelight/agents/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "safelight/common/error.hpp"
#include "safelight/nn/losses.hpp"
#include "safelight/safety/safety_model.hpp"

namespace safelight::agents {

int argmax(std::span<const double> values) {
  if (values.empty()) throw Error("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<int>(best);
}

double double_q_value(double reward, bool terminal, double gamma, std::span<const double> online_next_q,
                      std::span<const double> target_next_q) {
  if (terminal) return reward;
  const auto a = static_cast<std::size_t>(argmax(online_next_q));
  return reward + gamma * target_next_q[a];
}

namespace {

nn::Matrix stack(const std::vector<const Transition*>& batch, bool next) {
  const auto& first = next ? batch.front()->next_state : batch.front()->state;
  nn::Matrix m(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(first.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& v = next ? batch[i]->next_state : batch[i]->state;
    if (v.size() != first.size()) throw DimensionError("transition state", first.size(), v.size());
    for (std::size_t j = 0; j < v.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
  }
  return m;
}

std::span<const double> row_span(const nn::Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

std::vector<double> double_q_target(const std::vector<const Transition*>& batch, const DuelingQNetwork& online,
                                    const DuelingQNetwork& target, double gamma) {
  const nn::Matrix next = stack(batch, true);
  const nn::Matrix q_online = online.q_batch(next);
  const nn::Matrix q_target = target.q_batch(next);
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    y[i] = double_q_value(batch[i]->reward, batch[i]->terminal, gamma, row_span(q_online, r), row_span(q_target, r));
  }
  return y;
}

BatchLoss dqn_batch_loss(const DuelingQNetwork& online, const std::vector<const Transition*>& batch,
                         std::span<const double> targets, std::span<const double> weights, const LossWeights& w) {
  const auto n = batch.size();
  if (targets.size() != n) throw DimensionError("targets", n, targets.size());
  if (weights.size() != n) throw DimensionError("weights", n, weights.size());
  BatchLoss out;
  const auto cache = online.forward(stack(batch, false));
  const auto acts = static_cast<Eigen::Index>(online.actions());
  const double inv_n = 1.0 / static_cast<double>(n);
  nn::Matrix dq = nn::Matrix::Zero(static_cast<Eigen::Index>(n), acts);
  nn::Matrix da;
  out.td_errors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto a = static_cast<Eigen::Index>(batch[i]->action);
    const double td = cache.q(r, a) - targets[i];
    out.td_errors[i] = td;
    out.mse += weights[i] * td * td * inv_n;
    dq(r, a) = w.lambda1 * 2.0 * weights[i] * td * inv_n;
  }
  // The KL term is skipped outright when its weight is zero so that runs
  // without it stay bitwise identical to the plain TD objective.
  if (w.lambda2 != 0.0) {
    const auto& adv = cache.advantage.output();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& unsafe = batch[i]->unsafe;
      if (unsafe.empty() || !unsafe.at(static_cast<std::size_t>(batch[i]->action))) continue;
      out.all_safe = false;
      ++out.unsafe_samples;
      safety::SafetyVerdict v;
      v.unsafe = unsafe;
      const auto r = static_cast<Eigen::Index>(i);
      const auto logits = row_span(adv, r);
      const auto target = safety::desired_distribution(v, logits, batch[i]->action);
      const auto q = nn::softmax(logits);
      out.kl += nn::kl_divergence(target, q).value * inv_n;
      if (da.size() == 0) da = nn::Matrix::Zero(static_cast<Eigen::Index>(n), acts);
      for (Eigen::Index j = 0; j < acts; ++j)
        da(r, j) = w.lambda2 * (q[static_cast<std::size_t>(j)] - target[static_cast<std::size_t>(j)]) * inv_n;
    }
  } else {
    for (const auto* t : batch)
      if (!t->unsafe.empty() && t->unsafe.at(static_cast<std::size_t>(t->action))) {
        out.all_safe = false;
        ++out.unsafe_samples;
      }
  }
  out.loss = w.lambda1 * out.mse + (w.lambda2 != 0.0 ? w.lambda2 * out.kl : 0.0);
  out.grads = online.backward(cache, dq, da);
  return out;
}

DqnAgent::DqnAgent(std::size_t base_dim, std::size_t actions, const std::vector<std::size_t>& hidden,
                   std::size_t embed_dim, const AgentConfig& config, std::uint64_t seed)
    : config_(config),
      rng_(seed),
      online_(base_dim, actions, hidden, embed_dim, rng_),
      target_(online_),
      buffer_(config.buffer_capacity, config.alpha, config.priority_eps) {
  config_.validate();
  adam_.config.lr = config_.lr;
}

int DqnAgent::select_action(std::span<const double> state, double epsilon) {
  const double u = rng_.uniform();
  if (u < epsilon) return static_cast<int>(rng_.below(online_.actions()));
  return greedy_action(state);
}

int DqnAgent::greedy_action(std::span<const double> state) const { return argmax(online_.q_values(state)); }

std::vector<double> DqnAgent::advantage_distribution(std::span<const double> state) const {
  return nn::softmax(online_.advantages(state));
}

void DqnAgent::remember(Transition t) {
  if (t.state.size() != online_.input_dim()) throw DimensionError("transition state", online_.input_dim(), t.state.size());
  buffer_.push(std::move(t));
}

double DqnAgent::beta() const {
  if (config_.beta_steps == 0) return config_.beta_end;
  const double frac = std::min(1.0, static_cast<double>(steps_) / static_cast<double>(config_.beta_steps));
  return config_.beta_start + (config_.beta_end - config_.beta_start) * frac;
}

DqnTrainStats DqnAgent::train_step(const LossWeights& w) {
  DqnTrainStats stats;
  if (buffer_.size() < std::max(config_.batch_size, config_.warmup)) return stats;
  const auto sample = buffer_.sample(config_.batch_size, beta(), rng_);
  std::vector<const Transition*> batch;
  batch.reserve(sample.indices.size());
  for (auto i : sample.indices) batch.push_back(&buffer_.at(i));
  const auto targets = double_q_target(batch, online_, target_, config_.gamma);
  auto bl = dqn_batch_loss(online_, batch, targets, sample.weights, w);
  if (config_.grad_clip > 0.0) {
    const double norm = std::sqrt(bl.grads.squared_norm());
    if (norm > config_.grad_clip) bl.grads.scale(config_.grad_clip / norm);
  }
  const auto grads = bl.grads.views();
  const auto params = online_.parameters();
  nn::adam_step(params, grads, adam_);
  buffer_.update_priorities(sample.indices, bl.td_errors);
  ++steps_;
  if (steps_ % config_.target_sync_steps == 0) target_.copy_from(online_, config_.target_tau);
  stats.trained = true;
  stats.loss = bl.loss;
  stats.mse = bl.mse;
  stats.kl = bl.kl;
  stats.all_safe = bl.all_safe;
  stats.unsafe_samples = bl.unsafe_samples;
  return stats;
}

void store_network(nn::Checkpoint& ckpt, const std::string& prefix, const DuelingQNetwork& net) {
  if (net.embedding().enabled()) ckpt.networks[prefix + "/embedding"] = net.embedding().layer();
  ckpt.networks[prefix + "/trunk"] = net.trunk();
  ckpt.networks[prefix + "/value"] = net.value_head();
  ckpt.networks[prefix + "/advantage"] = net.advantage_head();
}

DuelingQNetwork load_network(const nn::Checkpoint& ckpt, const std::string& prefix, std::size_t base_dim,
                             std::size_t actions) {
  auto get = [&](const std::string& name) -> const nn::Mlp& {
    auto it = ckpt.networks.find(prefix + "/" + name);
    if (it == ckpt.networks.end()) throw ConfigError("checkpoint", "missing network " + prefix + "/" + name);
    return it->second;
  };
  safety::SafetyEmbedding emb;
  if (ckpt.networks.count(prefix + "/embedding")) emb = safety::SafetyEmbedding::from_layer(get("embedding"));
  return DuelingQNetwork::from_parts(base_dim, actions, std::move(emb), get("trunk"), get("value"), get("advantage"));
}

void DqnAgent::store(nn::Checkpoint& ckpt, const std::string& prefix) const {
  store_network(ckpt, prefix + "/online", online_);
  store_network(ckpt, prefix + "/target", target_);
  ckpt.optimizers[prefix + "/adam"] = adam_;
  ckpt.metadata[prefix + "/train_steps"] = steps_;
  ckpt.metadata[prefix + "/decisions"] = decisions_;
  ckpt.metadata[prefix + "/rng"] = rng_.serialize();
}

void DqnAgent::restore(const nn::Checkpoint& ckpt, const std::string& prefix) {
  auto online = load_network(ckpt, prefix + "/online", online_.base_dim(), online_.actions());
  auto target = load_network(ckpt, prefix + "/target", online_.base_dim(), online_.actions());
  if (!online.same_architecture(online_)) throw ConfigError("checkpoint", "architecture mismatch for " + prefix);
  online_ = std::move(online);
  target_ = std::move(target);
  auto it = ckpt.optimizers.find(prefix + "/adam");
  if (it != ckpt.optimizers.end()) adam_ = it->second;
  steps_ = ckpt.metadata.value(prefix + "/train_steps", std::uint64_t{0});
  decisions_ = ckpt.metadata.value(prefix + "/decisions", std::uint64_t{0});
  if (ckpt.metadata.contains(prefix + "/rng")) rng_.deserialize(ckpt.metadata.at(prefix + "/rng").get<std::string>());
}

}  // namespace safelight::agents
