#pragma once

#include <string>
#include <vector>

#include "safelight/signal/phase.hpp"

namespace safelight::signal {

enum class ActionMode { cyclic, acyclic };

const char* to_string(ActionMode m);
ActionMode action_mode_from_string(const std::string& s);

// Cyclic: adjust one phase of the cycle by -delta, 0 or +delta.
// Acyclic: run `phase` next.
struct Action {
  ActionMode mode = ActionMode::cyclic;
  int phase = 0;  // cyclic: position in the cycle; acyclic: phase id
  int delta_sign = 0;

  bool operator==(const Action&) const = default;
};

// Index layout. Cyclic: 0 is the no-op, then (phase i, -delta) at 1 + 2i and
// (phase i, +delta) at 2 + 2i. Acyclic: index == phase id.
class ActionSpace {
 public:
  ActionSpace(ActionMode mode, int phase_count);

  ActionMode mode() const { return mode_; }
  int phase_count() const { return phase_count_; }
  int size() const { return mode_ == ActionMode::cyclic ? 2 * phase_count_ + 1 : phase_count_; }
  Action decode(int index) const;
  int encode(const Action& a) const;
  std::string describe(int index) const;

 private:
  ActionMode mode_;
  int phase_count_;
};

struct CyclicPlan {
  std::vector<int> phase_ids;  // fixed order
  std::vector<double> durations_s;
  std::vector<double> min_s;
  std::vector<double> max_s;
  double yellow_s = 3.0;
  double all_red_s = 2.0;

  static CyclicPlan from_table(const PhaseTable& t);
  double cycle_length() const;
  void validate() const;
};

// Selected duration += delta_sign * delta_d, clamped to [min, max].
CyclicPlan apply_cyclic_action(const CyclicPlan& plan, const Action& action, double delta_d_s);

}  // namespace safelight::signal
