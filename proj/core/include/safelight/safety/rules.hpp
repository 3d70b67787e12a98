#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safelight/safety/observation.hpp"

namespace safelight::safety {

enum class RuleType {
  speed_85th,      // opposing 85th-percentile speed above threshold (m/s)
  foe_arrival,     // an opposing through vehicle reaches the conflict point within threshold (s)
  opposing_lanes,  // opposing through served by at least threshold lanes with demand
};

enum class ArrivalModel { kinematic, constant_speed };

struct SafetyRule {
  std::string id;
  RuleType type = RuleType::speed_85th;
  double threshold = 0.0;
  ArrivalModel arrival = ArrivalModel::kinematic;
  bool enabled = true;
  std::string description;

  // True when the rule makes a permitted mode unsafe for this left movement.
  bool triggers(const LeftObservation& obs) const;
};

inline constexpr double kFortyFiveMph = 20.1168;

struct RuleSet {
  std::vector<SafetyRule> rules;

  static RuleSet defaults();
  static RuleSet none() { return {}; }
};

RuleSet rules_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RuleSet& r);

}  // namespace safelight::safety
