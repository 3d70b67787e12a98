#pragma once

#include <deque>
#include <span>
#include <vector>

#include "safelight/signal/action.hpp"
#include "safelight/signal/phase.hpp"
#include "safelight/sim/signal_view.hpp"

namespace safelight::signal {

using sim::Indication;
using sim::Interval;

struct SignalState {
  int active_phase = 0;
  Interval interval = Interval::green;
  double time_in_interval_s = 0.0;
};

// Indication of one movement. `override_red` forces a permitted movement to
// red without touching anything else in the phase.
Indication indication_for(const SignalState& s, const PhaseTable& t, MovementId m, bool override_red = false);

// overrides is either empty or one flag per movement.
sim::SignalView signal_view(const SignalState& s, const PhaseTable& t, std::size_t movement_count,
                            std::span<const bool> overrides = {});

struct ScheduledInterval {
  int phase = 0;
  Interval interval = Interval::green;
  double duration_s = 0.0;

  bool operator==(const ScheduledInterval&) const = default;
};

// Same phase: one green extension of dt_exec. Otherwise yellow and all-red of
// the outgoing phase, then dt_exec of the new green.
std::vector<ScheduledInterval> apply_acyclic_action(const SignalState& s, const PhaseTable& t, int phase,
                                                    double dt_exec);

// One full cycle: green, yellow, all-red for every phase in order.
std::vector<ScheduledInterval> cycle_schedule(const CyclicPlan& plan);

// Signal state machine. The harness asks for a decision whenever the current
// schedule has run out: once per cycle in cyclic mode, every action window in
// acyclic mode.
class SignalController {
 public:
  SignalController(PhaseTable table, ActionMode mode);
  static SignalController fixed_time(PhaseTable table);

  bool fixed() const { return fixed_; }
  bool needs_decision() const { return !fixed_ && queue_.empty(); }
  void apply(int action_index);
  // Returns true when the signal state changed at the end of this tick.
  bool advance(double dt);

  const SignalState& state() const { return state_; }
  const CyclicPlan& plan() const { return plan_; }
  const PhaseTable& table() const { return table_; }
  const ActionSpace& action_space() const { return space_; }
  double scheduled_remaining_s() const;

  sim::SignalView view(std::size_t movement_count, std::span<const bool> overrides = {}) const;

  // Controller context for the agent state: normalized cycle durations in
  // cyclic mode, one-hot active phase in acyclic mode.
  std::vector<double> context_features() const;
  std::size_t context_length() const;

 private:
  PhaseTable table_;
  ActionSpace space_;
  CyclicPlan plan_;
  bool fixed_ = false;
  SignalState state_;
  std::deque<ScheduledInterval> queue_;
  double remaining_s_ = 0.0;
};

}  // namespace safelight::signal
