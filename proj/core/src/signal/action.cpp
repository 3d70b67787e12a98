#include "safelight/signal/action.hpp"

#include <algorithm>
#include <numeric>

#include "safelight/common/error.hpp"

namespace safelight::signal {

const char* to_string(ActionMode m) { return m == ActionMode::cyclic ? "cyclic" : "acyclic"; }

ActionMode action_mode_from_string(const std::string& s) {
  if (s == "cyclic") return ActionMode::cyclic;
  if (s == "acyclic") return ActionMode::acyclic;
  throw ConfigError("action_mode", "expected 'cyclic' or 'acyclic', got '" + s + "'");
}

ActionSpace::ActionSpace(ActionMode mode, int phase_count) : mode_(mode), phase_count_(phase_count) {
  if (phase_count <= 0) throw ConfigError("action_space", "needs at least one phase");
}

Action ActionSpace::decode(int index) const {
  if (index < 0 || index >= size()) throw Error("action index " + std::to_string(index) + " out of range");
  if (mode_ == ActionMode::acyclic) return {ActionMode::acyclic, index, 0};
  if (index == 0) return {ActionMode::cyclic, 0, 0};
  const int k = index - 1;
  return {ActionMode::cyclic, k / 2, k % 2 == 0 ? -1 : +1};
}

int ActionSpace::encode(const Action& a) const {
  if (a.mode != mode_) throw Error("action mode does not match the action space");
  if (a.phase < 0 || a.phase >= phase_count_) throw Error("action phase out of range");
  if (mode_ == ActionMode::acyclic) return a.phase;
  if (a.delta_sign == 0) return 0;
  return 1 + 2 * a.phase + (a.delta_sign > 0 ? 1 : 0);
}

std::string ActionSpace::describe(int index) const {
  const auto a = decode(index);
  if (mode_ == ActionMode::acyclic) return "phase " + std::to_string(a.phase);
  if (a.delta_sign == 0) return "keep";
  return "phase " + std::to_string(a.phase) + (a.delta_sign > 0 ? " +" : " -");
}

CyclicPlan CyclicPlan::from_table(const PhaseTable& t) {
  CyclicPlan p;
  for (auto id : t.cyclic_order) {
    const auto& ph = t.phase(id);
    p.phase_ids.push_back(id);
    p.durations_s.push_back(ph.initial_duration_s);
    p.min_s.push_back(ph.min_duration_s);
    p.max_s.push_back(ph.max_duration_s);
  }
  p.yellow_s = t.timing.yellow_s;
  p.all_red_s = t.timing.all_red_s;
  p.validate();
  return p;
}

double CyclicPlan::cycle_length() const {
  return std::accumulate(durations_s.begin(), durations_s.end(), 0.0) +
         static_cast<double>(durations_s.size()) * (yellow_s + all_red_s);
}

void CyclicPlan::validate() const {
  const auto n = phase_ids.size();
  if (n == 0 || durations_s.size() != n || min_s.size() != n || max_s.size() != n)
    throw ConfigError("cyclic_plan", "inconsistent phase lists");
  for (std::size_t i = 0; i < n; ++i)
    if (durations_s[i] < min_s[i] || durations_s[i] > max_s[i])
      throw ConfigError("cyclic_plan", "duration outside [min, max]");
}

CyclicPlan apply_cyclic_action(const CyclicPlan& plan, const Action& action, double delta_d_s) {
  if (action.mode != ActionMode::cyclic) throw Error("apply_cyclic_action needs a cyclic action");
  CyclicPlan out = plan;
  if (action.delta_sign == 0) return out;
  const auto i = static_cast<std::size_t>(action.phase);
  out.durations_s.at(i) =
      std::clamp(out.durations_s[i] + action.delta_sign * delta_d_s, out.min_s[i], out.max_s[i]);
  return out;
}

}  // namespace safelight::signal
