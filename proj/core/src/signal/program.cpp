#include "safelight/signal/program.hpp"

#include "safelight/common/error.hpp"

namespace safelight::signal {

Indication indication_for(const SignalState& s, const PhaseTable& t, MovementId m, bool override_red) {
  const auto& p = t.phase(s.active_phase);
  switch (s.interval) {
    case Interval::green:
      if (p.is_protected(m)) return Indication::protected_green;
      if (p.is_permitted(m)) return override_red ? Indication::red : Indication::permitted_green;
      return Indication::red;
    case Interval::yellow:
      if (p.is_protected(m)) return Indication::yellow;
      if (p.is_permitted(m)) return override_red ? Indication::red : Indication::yellow;
      return Indication::red;
    case Interval::all_red:
      return Indication::red;
  }
  return Indication::red;
}

sim::SignalView signal_view(const SignalState& s, const PhaseTable& t, std::size_t movement_count,
                            std::span<const bool> overrides) {
  if (!overrides.empty() && overrides.size() != movement_count)
    throw DimensionError("signal overrides", movement_count, overrides.size());
  sim::SignalView v;
  v.interval = s.interval;
  v.indications.resize(movement_count);
  for (std::size_t m = 0; m < movement_count; ++m)
    v.indications[m] = indication_for(s, t, static_cast<MovementId>(m), !overrides.empty() && overrides[m]);
  return v;
}

std::vector<ScheduledInterval> apply_acyclic_action(const SignalState& s, const PhaseTable& t, int phase,
                                                    double dt_exec) {
  t.phase(phase);  // throws on unknown id
  if (phase == s.active_phase && s.interval == Interval::green) return {{phase, Interval::green, dt_exec}};
  std::vector<ScheduledInterval> out;
  if (s.interval == Interval::green) {
    if (t.timing.yellow_s > 0) out.push_back({s.active_phase, Interval::yellow, t.timing.yellow_s});
    if (t.timing.all_red_s > 0) out.push_back({s.active_phase, Interval::all_red, t.timing.all_red_s});
  } else if (s.interval == Interval::yellow && t.timing.all_red_s > 0) {
    out.push_back({s.active_phase, Interval::all_red, t.timing.all_red_s});
  }
  out.push_back({phase, Interval::green, dt_exec});
  return out;
}

std::vector<ScheduledInterval> cycle_schedule(const CyclicPlan& plan) {
  std::vector<ScheduledInterval> out;
  for (std::size_t i = 0; i < plan.phase_ids.size(); ++i) {
    out.push_back({plan.phase_ids[i], Interval::green, plan.durations_s[i]});
    if (plan.yellow_s > 0) out.push_back({plan.phase_ids[i], Interval::yellow, plan.yellow_s});
    if (plan.all_red_s > 0) out.push_back({plan.phase_ids[i], Interval::all_red, plan.all_red_s});
  }
  return out;
}

SignalController::SignalController(PhaseTable table, ActionMode mode)
    : table_(std::move(table)),
      space_(mode, mode == ActionMode::cyclic ? static_cast<int>(table_.cyclic_order.size())
                                              : static_cast<int>(table_.phases.size())),
      plan_(CyclicPlan::from_table(table_)) {
  state_.active_phase = mode == ActionMode::cyclic ? plan_.phase_ids.front() : 0;
}

SignalController SignalController::fixed_time(PhaseTable table) {
  SignalController c(std::move(table), ActionMode::cyclic);
  c.fixed_ = true;
  c.apply(0);
  return c;
}

void SignalController::apply(int action_index) {
  std::vector<ScheduledInterval> next;
  if (space_.mode() == ActionMode::cyclic) {
    if (!fixed_) plan_ = apply_cyclic_action(plan_, space_.decode(action_index), table_.timing.delta_d_s);
    next = cycle_schedule(plan_);
  } else {
    next = apply_acyclic_action(state_, table_, space_.decode(action_index).phase, table_.timing.acyclic_dt_s);
  }
  const bool was_empty = queue_.empty();
  for (const auto& s : next) queue_.push_back(s);
  if (was_empty) {
    const auto& f = queue_.front();
    if (f.phase != state_.active_phase || f.interval != state_.interval) state_.time_in_interval_s = 0.0;
    state_.active_phase = f.phase;
    state_.interval = f.interval;
    remaining_s_ = f.duration_s;
  }
}

bool SignalController::advance(double dt) {
  state_.time_in_interval_s += dt;
  if (queue_.empty()) return false;
  remaining_s_ -= dt;
  if (remaining_s_ > 1e-9) return false;
  const auto prev = state_;
  queue_.pop_front();
  if (queue_.empty() && fixed_)
    for (const auto& s : cycle_schedule(plan_)) queue_.push_back(s);
  if (queue_.empty()) return false;
  const auto& f = queue_.front();
  state_.active_phase = f.phase;
  state_.interval = f.interval;
  remaining_s_ = f.duration_s;
  const bool changed = prev.active_phase != state_.active_phase || prev.interval != state_.interval;
  if (changed) state_.time_in_interval_s = 0.0;
  return changed;
}

double SignalController::scheduled_remaining_s() const {
  if (queue_.empty()) return 0.0;
  double r = remaining_s_;
  for (std::size_t i = 1; i < queue_.size(); ++i) r += queue_[i].duration_s;
  return r;
}

sim::SignalView SignalController::view(std::size_t movement_count, std::span<const bool> overrides) const {
  return signal_view(state_, table_, movement_count, overrides);
}

std::size_t SignalController::context_length() const {
  return space_.mode() == ActionMode::cyclic ? plan_.phase_ids.size() : table_.phases.size();
}

std::vector<double> SignalController::context_features() const {
  std::vector<double> out(context_length(), 0.0);
  if (space_.mode() == ActionMode::cyclic) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = plan_.durations_s[i] / plan_.max_s[i];
  } else {
    out[static_cast<std::size_t>(state_.active_phase)] = 1.0;
  }
  return out;
}

}  // namespace safelight::signal
