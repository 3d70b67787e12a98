#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safelight/sim/geometry.hpp"

namespace safelight::signal {

using sim::MovementId;

struct Phase {
  int id = -1;
  std::string name;
  std::vector<MovementId> protected_green;
  std::vector<MovementId> permitted;  // left-like movements that proceed by yielding
  double min_duration_s = 10.0;
  double max_duration_s = 60.0;
  double initial_duration_s = 30.0;

  bool is_protected(MovementId m) const;
  bool is_permitted(MovementId m) const;
  bool serves(MovementId m) const { return is_protected(m) || is_permitted(m); }
};

struct TimingConfig {
  double yellow_s = 3.0;
  double all_red_s = 2.0;
  double delta_d_s = 5.0;     // cyclic duration step
  double acyclic_dt_s = 10.0;  // acyclic green per action
};

struct PhaseTable {
  std::vector<Phase> phases;           // every phase the acyclic agent may pick
  std::vector<int> cyclic_order;       // indices into `phases`, fixed cycle order
  TimingConfig timing;

  // Throws ConfigError: conflicting protected movements, permitted movements
  // with no protected foe or crossing each other, bad durations.
  void validate(const sim::IntersectionGeometry& g) const;
  const Phase& phase(int id) const;
};

PhaseTable phase_table_from_json(const nlohmann::json& j, const sim::IntersectionGeometry& g);
nlohmann::json to_json(const PhaseTable& t, const sim::IntersectionGeometry& g);

}  // namespace safelight::signal
