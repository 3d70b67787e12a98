#include "safelight/harness/episode.hpp"

#include <algorithm>
#include <cmath>

#include "safelight/common/error.hpp"
#include "safelight/safety/embedding.hpp"
#include "safelight/safety/observation.hpp"
#include "safelight/signal/program.hpp"
#include "safelight/sim/encoders.hpp"
#include "safelight/sim/simulator.hpp"
#include "safelight/variants/objectives.hpp"

namespace safelight::harness {

using variants::VariantKind;

void LearnStats::merge(const LearnStats& o) {
  batches += o.batches;
  safe_batches += o.safe_batches;
  max_safe_batch_kl = std::max(max_safe_batch_kl, o.max_safe_batch_kl);
  kl_sum += o.kl_sum;
  loss_sum += o.loss_sum;
}

namespace {

signal::SignalController make_controller(const RunConfig& cfg) {
  if (cfg.variant.kind == VariantKind::fixed_time) return signal::SignalController::fixed_time(cfg.scenario.table);
  return signal::SignalController(cfg.scenario.table, cfg.mode);
}

std::vector<double> encode(const RunConfig& cfg, const sim::Simulator& sim, const signal::SignalController& ctl) {
  const auto& g = sim.geometry();
  std::vector<double> s = cfg.encoding == StateEncoding::grid
                              ? sim::encode_state_grid(g, sim.state().vehicles)
                              : sim::encode_state_lane(g, sim.state().vehicles, sim.config().stop_speed_mps);
  const auto ctx = ctl.context_features();
  s.insert(s.end(), ctx.begin(), ctx.end());
  return s;
}

}  // namespace

std::size_t base_state_length(const RunConfig& cfg) {
  const auto& g = *cfg.scenario.geometry;
  const std::size_t enc = cfg.encoding == StateEncoding::grid ? sim::grid_length(g) : sim::lane_feature_length(g);
  return enc + make_controller(cfg).context_length();
}

Learner::Learner(const RunConfig& cfg, std::size_t base_dim, std::size_t actions)
    : cfg_(cfg), base_dim_(base_dim), actions_(actions) {
  const auto seed = agent_seed(cfg);
  if (cfg.backbone == Backbone::ppo) {
    ppo_ = std::make_unique<agents::PpoAgent>(base_dim, actions, cfg.hidden(), cfg.agent, seed);
    return;
  }
  const std::size_t embed = cfg.variant.embeds_safety() ? cfg.variant.embedding_dim : 0;
  dqn_ = std::make_unique<agents::DqnAgent>(base_dim, actions, cfg.hidden(), embed, cfg.agent, seed);
  if (cfg.variant.two_heads())
    safety_ = std::make_unique<agents::DqnAgent>(base_dim, actions, cfg.hidden(), 0, cfg.agent, mix_seed(seed, 2));
}

std::vector<double> Learner::network_input(std::span<const double> base, const safety::SafetyVerdict& v) const {
  std::vector<double> s(base.begin(), base.end());
  if (cfg_.variant.embeds_safety()) {
    const auto flags = v.flag_vector();
    s.insert(s.end(), flags.begin(), flags.end());
  }
  return s;
}

void Learner::choose(PendingDecision& d, bool explore) {
  if (ppo_) {
    if (explore) {
      const auto pd = ppo_->act(d.state);
      d.action = pd.action;
      d.log_prob = pd.log_prob;
      d.value = pd.value;
      d.prefs = pd.logits;
    } else {
      d.prefs = ppo_->logits(d.state);
      d.action = agents::argmax(d.prefs);
    }
    return;
  }
  d.prefs = dqn_->advantages(d.state);
  if (safety_) {
    bool random = false;
    if (explore) random = dqn_->rng().uniform() < dqn_->epsilon();
    if (random) {
      d.action = static_cast<int>(dqn_->rng().below(actions_));
    } else {
      d.action = variants::syn_q_select(dqn_->q_values(d.state), safety_->q_values(d.state), cfg_.variant.u1,
                                        cfg_.variant.u2);
    }
    return;
  }
  d.action = explore ? dqn_->select_action(d.state, dqn_->epsilon()) : dqn_->greedy_action(d.state);
}

double Learner::reward(const PendingDecision& d) const {
  const double mobility = -d.waiting_s;
  const auto& v = cfg_.variant;
  switch (v.kind) {
    case VariantKind::reward:
    case VariantKind::state_and_reward:
      return variants::shaped_reward(mobility, d.verdict, d.prefs, d.action, v.shaping_weight());
    case VariantKind::syn_r:
      return variants::syn_r_reward(mobility, variants::safety_reward(d.collisions, v.collision_penalty_s), v.w1,
                                    v.w2);
    default:
      return mobility;
  }
}

void Learner::learn(const PendingDecision& d, std::span<const double> next_state, bool terminal, LearnStats& stats) {
  const double scale = cfg_.agent.reward_scale;
  const double r = reward(d) / scale;
  if (ppo_) {
    ppo_->record({d.state, d.action, d.log_prob, d.value, r, d.verdict.unsafe});
    if (terminal) {
      ppo_->end_segment(0.0, true);
    } else if (ppo_->buffered_steps() >= cfg_.agent.ppo.rollout_steps) {
      ppo_->end_segment(ppo_->value(next_state), false);
    }
    if (ppo_->ready()) ppo_update(stats);
    return;
  }
  const std::vector<double> next(next_state.begin(), next_state.end());
  auto train = [&](agents::DqnAgent& agent, double reward, double lambda2) {
    agent.remember({d.state, d.action, reward, next, terminal, 1.0, d.verdict.unsafe});
    agent.count_decision();
    if (agent.decisions() % cfg_.agent.train_every != 0) return;
    const auto st = agent.train_step({cfg_.variant.lambda1, lambda2});
    if (!st.trained) return;
    ++stats.batches;
    stats.kl_sum += st.kl;
    stats.loss_sum += st.loss;
    if (st.all_safe) {
      ++stats.safe_batches;
      stats.max_safe_batch_kl = std::max(stats.max_safe_batch_kl, st.kl);
    }
  };
  train(*dqn_, r, cfg_.variant.loss_kl_weight());
  if (safety_) train(*safety_, variants::safety_reward(d.collisions, cfg_.variant.collision_penalty_s) / scale, 0.0);
}

void Learner::ppo_update(LearnStats& stats) {
  const auto st = ppo_->update(cfg_.variant.loss_kl_weight());
  if (!st.trained) return;
  stats.batches += st.minibatches;
  stats.safe_batches += st.safe_minibatches;
  stats.max_safe_batch_kl = std::max(stats.max_safe_batch_kl, st.max_safe_minibatch_kl);
  stats.kl_sum += st.kl * static_cast<double>(st.minibatches);
  stats.loss_sum += (st.actor_loss + st.critic_loss) * static_cast<double>(st.minibatches);
}

void Learner::end_episode(std::span<const double> next_state, LearnStats& stats) {
  if (!ppo_) return;
  ppo_->end_segment(ppo_->value(next_state), false);
  if (ppo_->ready()) ppo_update(stats);
}

double Learner::epsilon() const { return dqn_ ? dqn_->epsilon() : 0.0; }

void Learner::store(nn::Checkpoint& ckpt) const {
  ckpt.metadata["base_dim"] = base_dim_;
  ckpt.metadata["actions"] = actions_;
  ckpt.metadata["backbone"] = to_string(cfg_.backbone);
  ckpt.metadata["variant"] = variants::to_json(cfg_.variant);
  ckpt.metadata["agent"] = agents::to_json(cfg_.agent);
  ckpt.metadata["action_mode"] = signal::to_string(cfg_.mode);
  ckpt.metadata["state_encoding"] = to_string(cfg_.encoding);
  if (dqn_) dqn_->store(ckpt, "dqn");
  if (safety_) safety_->store(ckpt, "safety");
  if (ppo_) ppo_->store(ckpt, "ppo");
}

void Learner::restore(const nn::Checkpoint& ckpt) {
  const auto base = ckpt.metadata.value("base_dim", std::size_t{0});
  const auto actions = ckpt.metadata.value("actions", std::size_t{0});
  const auto backbone = ckpt.metadata.value("backbone", std::string{});
  if (base != base_dim_ || actions != actions_ || backbone != to_string(cfg_.backbone))
    throw ConfigError("checkpoint", "architecture mismatch: checkpoint has " + backbone + " with state " +
                                        std::to_string(base) + " and " + std::to_string(actions) + " actions");
  if (dqn_) dqn_->restore(ckpt, "dqn");
  if (safety_) safety_->restore(ckpt, "safety");
  if (ppo_) ppo_->restore(ckpt, "ppo");
}

std::unique_ptr<Learner> make_learner(const RunConfig& cfg) {
  if (!cfg.variant.learns()) return nullptr;
  const auto ctl = make_controller(cfg);
  return std::make_unique<Learner>(cfg, base_state_length(cfg), ctl.action_space().size());
}

EpisodeOutcome run_episode(const RunConfig& cfg, Learner* learner, std::uint64_t seed, int episode_index,
                           const EpisodeOptions& opt) {
  const auto& sc = cfg.scenario;
  const auto& g = *sc.geometry;
  const std::size_t n = g.movements.size();
  if (cfg.variant.learns() && !learner) throw Error("a learning variant needs a learner");

  sim::Simulator sim(sc.geometry, sc.demand, sc.sim, seed);
  if (opt.log) sim.set_event_log(opt.log);
  auto ctl = make_controller(cfg);
  safety::SafetyObserver observer(sc.geometry, cfg.detector_window_s);
  const auto& space = ctl.action_space();
  const bool filtering = cfg.variant.filters();
  // Evaluation episodes always track flagged exposure so shielded and
  // unshielded runs are comparable.
  const bool watching = filtering || !opt.train;
  const double dt = sc.sim.dt_s;
  const auto ticks = static_cast<long>(std::llround(cfg.episode_s / dt));

  EpisodeOutcome out;
  std::optional<PendingDecision> pending;
  auto close = [&](std::span<const double> next_state) {
    if (!pending) return;
    out.cumulative_reward += learner->reward(*pending);
    if (pending->intervened) ++out.intervened_decisions;
    if (opt.train) learner->learn(*pending, next_state, false, out.learn);
  };

  // std::vector<bool> has no contiguous storage to view as a span.
  auto override_buf = std::make_unique<bool[]>(n);
  const std::span<bool> overrides(override_buf.get(), n);
  for (long k = 0; k < ticks; ++k) {
    const double t = sim.state().time_s;
    if (!ctl.fixed() && ctl.needs_decision()) {
      const auto current = ctl.view(n);
      const auto obs = observer.observe(sim.state().vehicles, t, sc.demand, &current);
      const auto verdict = safety::evaluate(cfg.rules, obs, sc.table, space);
      const auto state = learner->network_input(encode(cfg, sim, ctl), verdict);
      close(state);
      PendingDecision d;
      d.state = state;
      d.verdict = verdict;
      learner->choose(d, opt.explore);
      if (verdict.unsafe.at(static_cast<std::size_t>(d.action))) ++out.unsafe_proposals;
      ctl.apply(d.action);
      ++out.decisions;
      pending = std::move(d);
    }

    // The shield re-evaluates the rules every tick and forces any flagged
    // left that would show permitted green to red.
    if (watching) {
      const auto current = ctl.view(n);
      const auto obs = observer.observe(sim.state().vehicles, t, sc.demand, &current);
      const auto flags = safety::flag_movements(cfg.rules, obs);
      bool changed = false;
      for (std::size_t m = 0; m < n; ++m) {
        overrides[m] = filtering && flags.flagged[m];
        if (overrides[m] && current.indications[m] == sim::Indication::permitted_green) changed = true;
      }
      const auto view = ctl.view(n, overrides);
      for (std::size_t m = 0; m < n; ++m)
        if (flags.flagged[m] && view.indications[m] == sim::Indication::permitted_green) ++out.flagged_permitted_ticks;
      if (changed) {
        ++out.override_ticks;
        if (pending) pending->intervened = true;
      }
    }

    const auto view = filtering ? ctl.view(n, overrides) : ctl.view(n);
    auto res = sim.step(view);
    observer.record(res.spot_samples);
    for (const auto& c : res.collisions) {
      if (c.during_change_interval()) ++out.change_interval_collisions;
      out.collisions.push_back(c);
    }
    if (pending) {
      pending->waiting_s += static_cast<double>(sim.state().ledger.stopped_now) * dt;
      pending->collisions += res.collisions.size();
    }
    if (ctl.advance(dt) && opt.log)
      opt.log->signal_change(sim.state().time_s, ctl.state().active_phase, ctl.state().interval);
  }

  if (pending) {
    safety::SafetyVerdict verdict;
    {
      const auto current = ctl.view(n);
      const auto obs = observer.observe(sim.state().vehicles, sim.state().time_s, sc.demand, &current);
      verdict = safety::evaluate(cfg.rules, obs, sc.table, space);
    }
    const auto state = learner->network_input(encode(cfg, sim, ctl), verdict);
    close(state);
    if (opt.train) learner->end_episode(state, out.learn);
  }
  sim.finish();

  out.report = sim::snapshot_metrics(sim.state().ledger, cfg.episode_s);
  out.report.episode = episode_index;
  out.report.seed = seed;
  out.report.intervention_rate =
      out.decisions ? static_cast<double>(out.intervened_decisions) / static_cast<double>(out.decisions) : 0.0;
  out.epsilon = learner && opt.explore ? learner->epsilon() : 0.0;
  return out;
}

}  // namespace safelight::harness
