#include "safelight/signal/phase.hpp"

#include <algorithm>

#include "safelight/common/error.hpp"

namespace safelight::signal {

bool Phase::is_protected(MovementId m) const {
  return std::find(protected_green.begin(), protected_green.end(), m) != protected_green.end();
}

bool Phase::is_permitted(MovementId m) const {
  return std::find(permitted.begin(), permitted.end(), m) != permitted.end();
}

const Phase& PhaseTable::phase(int id) const {
  if (id < 0 || id >= static_cast<int>(phases.size()))
    throw ConfigError("signal.phase", "unknown phase id " + std::to_string(id));
  return phases[static_cast<std::size_t>(id)];
}

void PhaseTable::validate(const sim::IntersectionGeometry& g) const {
  if (phases.empty()) throw ConfigError("signal.phases", "no phases declared");
  if (timing.yellow_s < 0 || timing.all_red_s < 0) throw ConfigError("signal.timing", "intervals must be >= 0");
  if (!(timing.delta_d_s > 0)) throw ConfigError("signal.delta_d_s", "must be positive");
  if (!(timing.acyclic_dt_s > 0)) throw ConfigError("signal.acyclic_dt_s", "must be positive");
  for (const auto& p : phases) {
    const std::string field = "signal.phases[" + p.name + "]";
    if (!(p.min_duration_s > 0) || p.min_duration_s > p.max_duration_s)
      throw ConfigError(field, "need 0 < min_duration_s <= max_duration_s");
    if (p.initial_duration_s < p.min_duration_s || p.initial_duration_s > p.max_duration_s)
      throw ConfigError(field, "initial duration outside [min, max]");
    for (std::size_t i = 0; i < p.protected_green.size(); ++i)
      for (std::size_t j = i + 1; j < p.protected_green.size(); ++j)
        if (g.conflicts(p.protected_green[i], p.protected_green[j]))
          throw ConfigError(field, "protected movements " + g.movements[static_cast<std::size_t>(p.protected_green[i])].name +
                                       " and " + g.movements[static_cast<std::size_t>(p.protected_green[j])].name +
                                       " conflict");
    // A permitted movement yields to protected traffic of its own phase; it
    // must have something to yield to, and permitted movements may not cross
    // each other (nobody would have priority).
    for (auto m : p.permitted) {
      const auto& mv = g.movements[static_cast<std::size_t>(m)];
      if (p.is_protected(m)) throw ConfigError(field, "movement both protected and permitted");
      bool yields = false;
      for (const auto& cp : mv.conflicts) {
        if (p.is_protected(cp.foe)) yields = true;
        if (p.is_permitted(cp.foe))
          throw ConfigError(field, "permitted movements " + mv.name + " and " +
                                       g.movements[static_cast<std::size_t>(cp.foe)].name + " conflict");
      }
      if (!yields) throw ConfigError(field, "permitted " + mv.name + " conflicts with no protected movement");
    }
  }
  if (cyclic_order.empty()) throw ConfigError("signal.cyclic_order", "empty");
  for (auto id : cyclic_order) phase(id);
}

namespace {

std::vector<MovementId> movement_list(const nlohmann::json& j, const sim::IntersectionGeometry& g) {
  std::vector<MovementId> out;
  for (const auto& n : j) out.push_back(g.require(n.get<std::string>()));
  return out;
}

int phase_index(const std::vector<Phase>& phases, const std::string& name) {
  for (const auto& p : phases)
    if (p.name == name) return p.id;
  throw ConfigError("signal.cyclic_order", "unknown phase '" + name + "'");
}

}  // namespace

PhaseTable phase_table_from_json(const nlohmann::json& j, const sim::IntersectionGeometry& g) {
  PhaseTable t;
  try {
    t.timing.yellow_s = j.value("yellow_s", t.timing.yellow_s);
    t.timing.all_red_s = j.value("all_red_s", t.timing.all_red_s);
    t.timing.delta_d_s = j.value("delta_d_s", t.timing.delta_d_s);
    t.timing.acyclic_dt_s = j.value("acyclic_dt_s", t.timing.acyclic_dt_s);
    for (const auto& jp : j.at("phases")) {
      Phase p;
      p.id = static_cast<int>(t.phases.size());
      p.name = jp.at("name").get<std::string>();
      p.protected_green = movement_list(jp.value("protected", nlohmann::json::array()), g);
      p.permitted = movement_list(jp.value("permitted", nlohmann::json::array()), g);
      p.min_duration_s = jp.value("min_s", p.min_duration_s);
      p.max_duration_s = jp.value("max_s", p.max_duration_s);
      p.initial_duration_s = jp.value("initial_s", p.initial_duration_s);
      t.phases.push_back(std::move(p));
    }
    for (const auto& n : j.at("cyclic_order")) t.cyclic_order.push_back(phase_index(t.phases, n.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("signal", e.what());
  }
  t.validate(g);
  return t;
}

nlohmann::json to_json(const PhaseTable& t, const sim::IntersectionGeometry& g) {
  auto names = [&](const std::vector<MovementId>& ms) {
    nlohmann::json a = nlohmann::json::array();
    for (auto m : ms) a.push_back(g.movements[static_cast<std::size_t>(m)].name);
    return a;
  };
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& p : t.phases)
    phases.push_back({{"name", p.name},
                      {"protected", names(p.protected_green)},
                      {"permitted", names(p.permitted)},
                      {"min_s", p.min_duration_s},
                      {"max_s", p.max_duration_s},
                      {"initial_s", p.initial_duration_s}});
  nlohmann::json order = nlohmann::json::array();
  for (auto id : t.cyclic_order) order.push_back(t.phases[static_cast<std::size_t>(id)].name);
  return {{"yellow_s", t.timing.yellow_s},
          {"all_red_s", t.timing.all_red_s},
          {"delta_d_s", t.timing.delta_d_s},
          {"acyclic_dt_s", t.timing.acyclic_dt_s},
          {"phases", phases},
          {"cyclic_order", order}};
}

}  // namespace safelight::signal
