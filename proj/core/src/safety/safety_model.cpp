#include "safelight/safety/safety_model.hpp"

#include <algorithm>
#include <numeric>

#include "safelight/common/error.hpp"
#include "safelight/nn/losses.hpp"

namespace safelight::safety {

bool MovementFlags::any() const { return std::find(flagged.begin(), flagged.end(), true) != flagged.end(); }

MovementFlags flag_movements(const RuleSet& rules, const SafetyObservation& obs) {
  MovementFlags f;
  f.flagged.assign(obs.movement_count, false);
  f.rules.assign(obs.movement_count, {});
  for (const auto& lo : obs.lefts) {
    for (const auto& rule : rules.rules) {
      if (!rule.triggers(lo)) continue;
      f.flagged[static_cast<std::size_t>(lo.movement)] = true;
      f.rules[static_cast<std::size_t>(lo.movement)].push_back(rule.id);
    }
  }
  return f;
}

bool CorrectedAction::overridden() const {
  return std::find(left_red.begin(), left_red.end(), true) != left_red.end();
}

bool SafetyVerdict::any_unsafe() const { return std::find(unsafe.begin(), unsafe.end(), true) != unsafe.end(); }

bool SafetyVerdict::all_unsafe() const {
  return !unsafe.empty() && std::all_of(unsafe.begin(), unsafe.end(), [](bool b) { return b; });
}

std::size_t SafetyVerdict::safe_count() const {
  return static_cast<std::size_t>(std::count(unsafe.begin(), unsafe.end(), false));
}

std::vector<double> SafetyVerdict::flag_vector() const {
  std::vector<double> out(unsafe.size());
  for (std::size_t i = 0; i < unsafe.size(); ++i) out[i] = unsafe[i] ? 1.0 : 0.0;
  return out;
}

namespace {

void append_unique(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  for (const auto& s : src)
    if (std::find(dst.begin(), dst.end(), s) == dst.end()) dst.push_back(s);
}

}  // namespace

SafetyVerdict evaluate(const MovementFlags& flags, const signal::PhaseTable& table, const signal::ActionSpace& space,
                       std::span<const bool> overrides) {
  const std::size_t nm = flags.flagged.size();
  if (!overrides.empty() && overrides.size() != nm) throw DimensionError("safety overrides", nm, overrides.size());
  SafetyVerdict v;
  const auto na = static_cast<std::size_t>(space.size());
  v.unsafe.assign(na, false);
  v.triggered.assign(na, {});
  v.flagged_movements.assign(nm, false);
  v.exposed_movements.assign(nm, false);
  for (std::size_t m = 0; m < nm; ++m) v.flagged_movements[m] = flags.flagged[m] && (overrides.empty() || !overrides[m]);

  if (space.mode() == signal::ActionMode::acyclic) {
    for (std::size_t a = 0; a < na; ++a) {
      const auto& phase = table.phase(static_cast<int>(a));
      for (auto m : phase.permitted) {
        if (!v.flagged_movements[static_cast<std::size_t>(m)]) continue;
        v.unsafe[a] = true;
        v.exposed_movements[static_cast<std::size_t>(m)] = true;
        append_unique(v.triggered[a], flags.rules[static_cast<std::size_t>(m)]);
      }
    }
    return v;
  }

  // Cyclic: exposure of a flagged movement is the green time of the phases
  // that permit it.
  std::vector<std::string> all_rules;
  for (auto id : table.cyclic_order)
    for (auto m : table.phase(id).permitted)
      if (v.flagged_movements[static_cast<std::size_t>(m)]) {
        v.exposed_movements[static_cast<std::size_t>(m)] = true;
        append_unique(all_rules, flags.rules[static_cast<std::size_t>(m)]);
      }
  const bool exposed = std::find(v.exposed_movements.begin(), v.exposed_movements.end(), true) !=
                       v.exposed_movements.end();
  if (!exposed) return v;
  for (std::size_t a = 0; a < na; ++a) {
    const auto action = space.decode(static_cast<int>(a));
    bool reduces = false;
    if (action.delta_sign != 0) {
      const auto& phase = table.phase(table.cyclic_order[static_cast<std::size_t>(action.phase)]);
      for (std::size_t m = 0; m < nm && !reduces; ++m) {
        if (!v.exposed_movements[m]) continue;
        const auto id = static_cast<sim::MovementId>(m);
        if (action.delta_sign < 0 && phase.is_permitted(id)) reduces = true;
        if (action.delta_sign > 0 && phase.is_protected(id)) reduces = true;
      }
    }
    if (!reduces) {
      v.unsafe[a] = true;
      v.triggered[a] = all_rules;
    }
  }
  return v;
}

SafetyVerdict evaluate(const RuleSet& rules, const SafetyObservation& obs, const signal::PhaseTable& table,
                       const signal::ActionSpace& space, std::span<const bool> overrides) {
  return evaluate(flag_movements(rules, obs), table, space, overrides);
}

CorrectedAction correct_action(int action, const SafetyVerdict& verdict, const signal::PhaseTable& table,
                               const signal::ActionSpace& space) {
  CorrectedAction c;
  c.action = action;
  c.left_red.assign(verdict.flagged_movements.size(), false);
  if (!verdict.unsafe.at(static_cast<std::size_t>(action))) return c;
  if (space.mode() == signal::ActionMode::acyclic) {
    for (auto m : table.phase(space.decode(action).phase).permitted)
      if (verdict.flagged_movements[static_cast<std::size_t>(m)]) c.left_red[static_cast<std::size_t>(m)] = true;
  } else {
    c.left_red = verdict.exposed_movements;
  }
  return c;
}

std::vector<double> desired_distribution(const SafetyVerdict& verdict, std::span<const double> advantages,
                                         int proposed) {
  if (advantages.size() != verdict.unsafe.size())
    throw DimensionError("advantages", verdict.unsafe.size(), advantages.size());
  auto q = nn::softmax(advantages);
  if (!verdict.unsafe.at(static_cast<std::size_t>(proposed))) return q;
  if (verdict.all_unsafe()) throw Error("desired_distribution: every action is unsafe");
  double safe_mass = 0.0;
  std::size_t n_unsafe = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (verdict.unsafe[i])
      ++n_unsafe;
    else
      safe_mass += q[i];
  }
  const double target_safe = 1.0 - nn::kKlFloor * static_cast<double>(n_unsafe);
  const double n_safe = static_cast<double>(q.size() - n_unsafe);
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (verdict.unsafe[i])
      out[i] = nn::kKlFloor;
    else
      out[i] = safe_mass > 0.0 ? q[i] / safe_mass * target_safe : target_safe / n_safe;
  }
  return out;
}

}  // namespace safelight::safety
