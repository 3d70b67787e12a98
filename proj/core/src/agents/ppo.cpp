#include "safelight/agents/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "safelight/agents/dqn.hpp"
#include "safelight/common/error.hpp"
#include "safelight/nn/losses.hpp"
#include "safelight/safety/safety_model.hpp"

namespace safelight::agents {

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double bootstrap,
                      bool terminal, double gamma, double lambda) {
  if (values.size() != rewards.size()) throw DimensionError("gae values", rewards.size(), values.size());
  const auto n = rewards.size();
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_value = terminal ? 0.0 : bootstrap;
  double gae = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double delta = rewards[k] + gamma * next_value - values[k];
    gae = delta + gamma * lambda * gae;
    out.advantages[k] = gae;
    out.returns[k] = gae + values[k];
    next_value = values[k];
  }
  return out;
}

double log_softmax_at(std::span<const double> logits, int action) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  return logits[static_cast<std::size_t>(action)] - m - std::log(z);
}

int sample_categorical(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

LossAndGrad ppo_actor_loss(const ActorBatch& b, double clip, double entropy_coef, double lambda2) {
  const auto n = static_cast<std::size_t>(b.logits.rows());
  const auto k = static_cast<std::size_t>(b.logits.cols());
  if (b.actions.size() != n) throw DimensionError("actor actions", n, b.actions.size());
  if (b.old_log_probs.size() != n) throw DimensionError("actor old log-probs", n, b.old_log_probs.size());
  if (b.advantages.size() != n) throw DimensionError("actor advantages", n, b.advantages.size());
  LossAndGrad out;
  out.grad = nn::Matrix::Zero(b.logits.rows(), b.logits.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::span<const double> z(b.logits.data() + r * b.logits.cols(), k);
    const auto p = nn::softmax(z);
    const int a = b.actions[i];
    const double logp = log_softmax_at(z, a);
    const double ratio = std::exp(logp - b.old_log_probs[i]);
    const double adv = b.advantages[i];
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
    const double surr = std::min(ratio * adv, clipped * adv);
    const bool clip_active = (adv >= 0.0 && ratio > 1.0 + clip) || (adv < 0.0 && ratio < 1.0 - clip);
    if (clip_active) out.clip_fraction += inv_n;
    const double d_logp = clip_active ? 0.0 : ratio * adv;

    double h = 0.0;
    for (double pj : p)
      if (pj > 0.0) h -= pj * std::log(pj);
    out.loss += (-surr - entropy_coef * h) * inv_n;
    out.entropy += h * inv_n;

    for (std::size_t j = 0; j < k; ++j) {
      const double onehot = static_cast<int>(j) == a ? 1.0 : 0.0;
      const double lp = p[j] > 0.0 ? std::log(p[j]) : 0.0;
      const double dh = -p[j] * (lp + h);
      out.grad(r, static_cast<Eigen::Index>(j)) = (-d_logp * (onehot - p[j]) - entropy_coef * dh) * inv_n;
    }

    if (lambda2 != 0.0 && !b.unsafe.empty() && !b.unsafe[i].empty() &&
        b.unsafe[i].at(static_cast<std::size_t>(a))) {
      safety::SafetyVerdict v;
      v.unsafe = b.unsafe[i];
      const auto target = safety::desired_distribution(v, z, a);
      const double kl = nn::kl_divergence(target, p).value;
      out.kl += kl * inv_n;
      out.loss += lambda2 * kl * inv_n;
      for (std::size_t j = 0; j < k; ++j)
        out.grad(r, static_cast<Eigen::Index>(j)) += lambda2 * (p[j] - target[j]) * inv_n;
    }
  }
  return out;
}

LossAndGrad ppo_critic_loss(const nn::Matrix& values, std::span<const double> returns, double value_coef) {
  const auto n = static_cast<std::size_t>(values.rows());
  if (returns.size() != n) throw DimensionError("critic returns", n, returns.size());
  LossAndGrad out;
  out.grad = nn::Matrix::Zero(values.rows(), 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double d = values(r, 0) - returns[i];
    out.loss += value_coef * d * d * inv_n;
    out.grad(r, 0) = value_coef * 2.0 * d * inv_n;
  }
  return out;
}

namespace {

std::vector<std::size_t> with_ends(std::size_t first, const std::vector<std::size_t>& hidden, std::size_t last) {
  std::vector<std::size_t> dims{first};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(last);
  return dims;
}

}  // namespace

PpoAgent::PpoAgent(std::size_t state_dim, std::size_t actions, const std::vector<std::size_t>& hidden,
                   const AgentConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed) {
  config_.validate();
  actor_ = nn::Mlp(with_ends(state_dim, hidden, actions), nn::Activation::relu, nn::Activation::identity, rng_);
  critic_ = nn::Mlp(with_ends(state_dim, hidden, 1), nn::Activation::relu, nn::Activation::identity, rng_);
  actor_adam_.config.lr = config_.lr;
  critic_adam_.config.lr = config_.lr;
}

PpoDecision PpoAgent::act(std::span<const double> state) {
  PpoDecision d;
  d.logits = actor_.forward(state);
  const auto p = nn::softmax(d.logits);
  d.action = sample_categorical(p, rng_);
  d.log_prob = log_softmax_at(d.logits, d.action);
  d.value = value(state);
  ++decisions_;
  return d;
}

int PpoAgent::greedy_action(std::span<const double> state) const { return argmax(actor_.forward(state)); }

void PpoAgent::record(PpoStep step) {
  if (step.state.size() != actor_.input_dim()) throw DimensionError("ppo state", actor_.input_dim(), step.state.size());
  open_.push_back(std::move(step));
}

void PpoAgent::end_segment(double bootstrap_value, bool terminal) {
  if (open_.empty()) return;
  Segment seg;
  seg.steps = std::move(open_);
  open_.clear();
  std::vector<double> rewards, values;
  for (const auto& s : seg.steps) {
    rewards.push_back(s.reward);
    values.push_back(s.value);
  }
  auto gae = compute_gae(rewards, values, bootstrap_value, terminal, config_.gamma, config_.ppo.gae_lambda);
  seg.advantages = std::move(gae.advantages);
  seg.returns = std::move(gae.returns);
  closed_.push_back(std::move(seg));
}

std::size_t PpoAgent::rollout_size() const {
  std::size_t n = 0;
  for (const auto& s : closed_) n += s.steps.size();
  return n;
}

PpoUpdateStats PpoAgent::update(double lambda2) {
  PpoUpdateStats stats;
  std::vector<const PpoStep*> steps;
  std::vector<double> adv, ret;
  for (const auto& seg : closed_)
    for (std::size_t i = 0; i < seg.steps.size(); ++i) {
      steps.push_back(&seg.steps[i]);
      adv.push_back(seg.advantages[i]);
      ret.push_back(seg.returns[i]);
    }
  if (steps.empty()) return stats;
  if (config_.ppo.normalize_advantages && adv.size() > 1) {
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(adv.size());
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / static_cast<double>(adv.size()));
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  }

  const std::size_t n = steps.size();
  const std::size_t mb = std::min(config_.ppo.minibatch, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t batches = 0;
  for (int epoch = 0; epoch < config_.ppo.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng_.below(i)]);
    for (std::size_t start = 0; start < n; start += mb) {
      const std::size_t end = std::min(n, start + mb);
      const auto m = static_cast<Eigen::Index>(end - start);
      nn::Matrix states(m, static_cast<Eigen::Index>(actor_.input_dim()));
      ActorBatch ab;
      std::vector<double> rb;
      for (std::size_t i = start; i < end; ++i) {
        const auto* s = steps[order[i]];
        const auto r = static_cast<Eigen::Index>(i - start);
        for (std::size_t j = 0; j < s->state.size(); ++j) states(r, static_cast<Eigen::Index>(j)) = s->state[j];
        ab.actions.push_back(s->action);
        ab.old_log_probs.push_back(s->log_prob);
        ab.advantages.push_back(adv[order[i]]);
        ab.unsafe.push_back(s->unsafe);
        rb.push_back(ret[order[i]]);
      }
      const auto actor_cache = actor_.forward_cached(states);
      ab.logits = actor_cache.output();
      const auto al = ppo_actor_loss(ab, config_.ppo.clip, config_.ppo.entropy_coef, lambda2);
      auto ag = actor_.backward(actor_cache, al.grad);
      const auto critic_cache = critic_.forward_cached(states);
      const auto cl = ppo_critic_loss(critic_cache.output(), rb, config_.ppo.value_coef);
      auto cg = critic_.backward(critic_cache, cl.grad);
      if (config_.grad_clip > 0.0) {
        for (auto* g : {&ag, &cg}) {
          double sq = 0.0;
          for (auto v : g->views())
            for (double x : v) sq += x * x;
          const double norm = std::sqrt(sq);
          if (norm > config_.grad_clip) g->scale(config_.grad_clip / norm);
        }
      }
      {
        const auto p = actor_.parameters();
        const auto g = ag.views();
        nn::adam_step(p, g, actor_adam_);
      }
      {
        const auto p = critic_.parameters();
        const auto g = cg.views();
        nn::adam_step(p, g, critic_adam_);
      }
      stats.actor_loss += al.loss;
      stats.critic_loss += cl.loss;
      stats.kl += al.kl;
      stats.entropy += al.entropy;
      stats.clip_fraction += al.clip_fraction;
      ++batches;
      bool all_safe = true;
      for (std::size_t i = 0; i < ab.unsafe.size() && all_safe; ++i)
        if (!ab.unsafe[i].empty() && ab.unsafe[i].at(static_cast<std::size_t>(ab.actions[i]))) all_safe = false;
      if (all_safe) {
        ++stats.safe_minibatches;
        stats.max_safe_minibatch_kl = std::max(stats.max_safe_minibatch_kl, al.kl);
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(batches);
  stats.actor_loss *= inv;
  stats.critic_loss *= inv;
  stats.kl *= inv;
  stats.entropy *= inv;
  stats.clip_fraction *= inv;
  stats.samples = n;
  stats.minibatches = batches;
  stats.trained = true;
  closed_.clear();
  ++updates_;
  return stats;
}

void PpoAgent::store(nn::Checkpoint& ckpt, const std::string& prefix) const {
  ckpt.networks[prefix + "/actor"] = actor_;
  ckpt.networks[prefix + "/critic"] = critic_;
  ckpt.optimizers[prefix + "/actor_adam"] = actor_adam_;
  ckpt.optimizers[prefix + "/critic_adam"] = critic_adam_;
  ckpt.metadata[prefix + "/updates"] = updates_;
  ckpt.metadata[prefix + "/decisions"] = decisions_;
  ckpt.metadata[prefix + "/rng"] = rng_.serialize();
}

void PpoAgent::restore(const nn::Checkpoint& ckpt, const std::string& prefix) {
  auto get = [&](const std::string& name) -> const nn::Mlp& {
    auto it = ckpt.networks.find(prefix + "/" + name);
    if (it == ckpt.networks.end()) throw ConfigError("checkpoint", "missing network " + prefix + "/" + name);
    return it->second;
  };
  const auto& actor = get("actor");
  const auto& critic = get("critic");
  if (!actor.same_architecture(actor_) || !critic.same_architecture(critic_))
    throw ConfigError("checkpoint", "architecture mismatch for " + prefix);
  actor_ = actor;
  critic_ = critic;
  if (auto it = ckpt.optimizers.find(prefix + "/actor_adam"); it != ckpt.optimizers.end()) actor_adam_ = it->second;
  if (auto it = ckpt.optimizers.find(prefix + "/critic_adam"); it != ckpt.optimizers.end()) critic_adam_ = it->second;
  updates_ = ckpt.metadata.value(prefix + "/updates", std::uint64_t{0});
  decisions_ = ckpt.metadata.value(prefix + "/decisions", std::uint64_t{0});
  if (ckpt.metadata.contains(prefix + "/rng")) rng_.deserialize(ckpt.metadata.at(prefix + "/rng").get<std::string>());
}

}  // namespace safelight::agents
