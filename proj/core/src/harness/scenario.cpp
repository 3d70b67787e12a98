#include "safelight/harness/scenario.hpp"

#include <fstream>

#include "safelight/common/error.hpp"

namespace safelight::harness {

Scenario scenario_from_json(const nlohmann::json& j) {
  for (const char* key : {"geometry", "demand", "signal"})
    if (!j.contains(key)) throw ConfigError(std::string("scenario.") + key, "missing");
  Scenario s;
  auto g = std::make_shared<sim::IntersectionGeometry>(sim::geometry_from_json(j.at("geometry")));
  s.name = g->name;
  s.demand = sim::demand_from_json(j.at("demand"), *g);
  s.table = signal::phase_table_from_json(j.at("signal"), *g);
  if (j.contains("sim")) s.sim = sim::sim_config_from_json(j.at("sim"));
  s.geometry = std::move(g);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario", path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

nlohmann::json to_json(const Scenario& s) {
  return {{"geometry", sim::to_json(*s.geometry)},
          {"demand", sim::to_json(s.demand, *s.geometry)},
          {"signal", signal::to_json(s.table, *s.geometry)},
          {"sim", sim::to_json(s.sim)}};
}

Scenario without_demand(Scenario s) {
  for (auto& segments : s.demand.rates)
    for (auto& seg : segments) seg.vph = 0.0;
  return s;
}

}  // namespace safelight::harness
