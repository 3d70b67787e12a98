#pragma once

#include <span>
#include <string>
#include <vector>

#include "safelight/safety/observation.hpp"
#include "safelight/safety/rules.hpp"
#include "safelight/signal/action.hpp"
#include "safelight/signal/phase.hpp"

namespace safelight::safety {

// π_H at movement level: which left-like movements may not run permitted now.
struct MovementFlags {
  std::vector<bool> flagged;                   // per movement
  std::vector<std::vector<std::string>> rules;  // triggered rule ids per movement

  bool any() const;
};

MovementFlags flag_movements(const RuleSet& rules, const SafetyObservation& obs);

// An action plus the permitted-left indications forced to red.
struct CorrectedAction {
  int action = -1;
  std::vector<bool> left_red;  // per movement

  bool overridden() const;
};

struct SafetyVerdict {
  std::vector<bool> unsafe;                        // per action
  std::vector<std::vector<std::string>> triggered;  // per action
  std::vector<bool> flagged_movements;             // after overrides
  std::vector<bool> exposed_movements;             // flagged and shown permitted by some action

  bool any_unsafe() const;
  bool all_unsafe() const;
  std::size_t safe_count() const;
  // One 0/1 entry per action; what the state embedding consumes.
  std::vector<double> flag_vector() const;
};

// Per-action verdict.
// Acyclic: picking a phase is unsafe iff that phase shows a flagged movement
// permitted_green.
// Cyclic: every cycle contains the permitted phases, so no action removes a
// flagged permitted left outright. An action counts as safe only if it cuts
// that exposure: shortening a phase that permits a flagged left, or
// lengthening the phase that protects it. With nothing flagged every action is
// safe.
// `overrides` (per movement, may be empty) are left-red overrides already in
// force; overridden movements are not exposed.
SafetyVerdict evaluate(const MovementFlags& flags, const signal::PhaseTable& table, const signal::ActionSpace& space,
                       std::span<const bool> overrides = {});
SafetyVerdict evaluate(const RuleSet& rules, const SafetyObservation& obs, const signal::PhaseTable& table,
                       const signal::ActionSpace& space, std::span<const bool> overrides = {});

// Identity for a safe action; otherwise the same action with the offending
// permitted lefts overridden to red.
CorrectedAction correct_action(int action, const SafetyVerdict& verdict, const signal::PhaseTable& table,
                               const signal::ActionSpace& space);

// Â: softmax(advantages) if the proposed action is safe; otherwise unsafe
// entries get kKlFloor and the safe entries share the rest in their softmax
// proportions.
std::vector<double> desired_distribution(const SafetyVerdict& verdict, std::span<const double> advantages,
                                         int proposed);

}  // namespace safelight::safety
