#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "safelight/signal/phase.hpp"
#include "safelight/sim/demand.hpp"
#include "safelight/sim/geometry.hpp"
#include "safelight/sim/simulator.hpp"

namespace safelight::harness {

struct Scenario {
  std::string name;
  std::shared_ptr<const sim::IntersectionGeometry> geometry;
  sim::DemandProfile demand;
  signal::PhaseTable table;
  sim::SimConfig sim;
};

// {"geometry": ..., "demand": ..., "signal": ..., "sim": optional}
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& s);

// Same intersection with every arrival rate set to zero.
Scenario without_demand(Scenario s);

}  // namespace safelight::harness
