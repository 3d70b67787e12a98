#include "safelight/safety/rules.hpp"

#include "safelight/common/error.hpp"
#include "safelight/sim/kinematics.hpp"

namespace safelight::safety {

bool SafetyRule::triggers(const LeftObservation& obs) const {
  if (!enabled) return false;
  switch (type) {
    case RuleType::speed_85th:
      return obs.speed_85th_mps.has_value() && *obs.speed_85th_mps > threshold;
    case RuleType::foe_arrival:
      for (const auto& f : obs.foes) {
        const double t = arrival == ArrivalModel::kinematic
                             ? sim::time_to_cover(f.distance_m, f.speed_mps, f.accel_mps2, f.vmax_mps)
                             : sim::time_at_constant_speed(f.distance_m, f.speed_mps);
        if (t < threshold) return true;
      }
      return false;
    case RuleType::opposing_lanes:
      return obs.opposing_through_lanes >= static_cast<int>(threshold);
  }
  return false;
}

RuleSet RuleSet::defaults() {
  RuleSet r;
  r.rules.push_back({"R1", RuleType::speed_85th, kFortyFiveMph, ArrivalModel::kinematic, true,
                     "permitted left unsafe when the opposing 85th-percentile speed exceeds 45 mph"});
  r.rules.push_back({"R2", RuleType::foe_arrival, 4.0, ArrivalModel::kinematic, true,
                     "permitted left unsafe when an opposing through vehicle reaches the conflict point within 4 s"});
  r.rules.push_back({"R3", RuleType::opposing_lanes, 3.0, ArrivalModel::kinematic, true,
                     "permitted left unsafe across three or more opposing through lanes with demand"});
  return r;
}

namespace {

RuleType rule_type_from_string(const std::string& s) {
  if (s == "speed_85th") return RuleType::speed_85th;
  if (s == "foe_arrival") return RuleType::foe_arrival;
  if (s == "opposing_lanes") return RuleType::opposing_lanes;
  throw ConfigError("safety.rules.type", "unknown rule type '" + s + "'");
}

const char* to_string(RuleType t) {
  switch (t) {
    case RuleType::speed_85th: return "speed_85th";
    case RuleType::foe_arrival: return "foe_arrival";
    case RuleType::opposing_lanes: return "opposing_lanes";
  }
  return "?";
}

}  // namespace

RuleSet rules_from_json(const nlohmann::json& j) {
  RuleSet r;
  try {
    for (const auto& jr : j) {
      SafetyRule rule;
      rule.id = jr.at("id").get<std::string>();
      rule.type = rule_type_from_string(jr.at("type").get<std::string>());
      rule.threshold = jr.at("threshold").get<double>();
      rule.enabled = jr.value("enabled", true);
      rule.description = jr.value("description", std::string{});
      const auto arrival = jr.value("arrival", std::string{"kinematic"});
      if (arrival == "kinematic")
        rule.arrival = ArrivalModel::kinematic;
      else if (arrival == "constant_speed")
        rule.arrival = ArrivalModel::constant_speed;
      else
        throw ConfigError("safety.rules." + rule.id + ".arrival", "expected kinematic or constant_speed");
      if (rule.threshold < 0) throw ConfigError("safety.rules." + rule.id + ".threshold", "must be >= 0");
      r.rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("safety.rules", e.what());
  }
  return r;
}

nlohmann::json to_json(const RuleSet& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& rule : r.rules)
    out.push_back({{"id", rule.id},
                   {"type", to_string(rule.type)},
                   {"threshold", rule.threshold},
                   {"arrival", rule.arrival == ArrivalModel::kinematic ? "kinematic" : "constant_speed"},
                   {"enabled", rule.enabled},
                   {"description", rule.description}});
  return out;
}

}  // namespace safelight::safety
