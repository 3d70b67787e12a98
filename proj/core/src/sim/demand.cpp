#include "safelight/sim/demand.hpp"

#include <cmath>

#include "safelight/common/error.hpp"

namespace safelight::sim {

double DemandProfile::rate_at(MovementId m, double t) const {
  const auto& segs = rates.at(static_cast<std::size_t>(m));
  double r = 0.0;
  for (const auto& s : segs) {
    if (s.start_s > t) break;
    r = s.vph;
  }
  return r;
}

void DemandProfile::validate(std::size_t movement_count) const {
  if (rates.size() != movement_count)
    throw ConfigError("demand.rates", "expected " + std::to_string(movement_count) + " movements, got " +
                                          std::to_string(rates.size()));
  if (!(ignore_foe_prob >= 0.0 && ignore_foe_prob <= 1.0))
    throw ConfigError("demand.ignore_foe_prob", "must lie in [0,1]");
  for (const auto& segs : rates) {
    double prev = -1.0;
    for (const auto& s : segs) {
      if (!(s.vph >= 0.0) || !std::isfinite(s.vph)) throw ConfigError("demand.rates", "rates must be >= 0");
      if (s.start_s <= prev) throw ConfigError("demand.rates", "segment start times must increase");
      prev = s.start_s;
    }
  }
}

DemandProfile DemandProfile::uniform(std::size_t movement_count, double vph, double ignore_foe_prob) {
  DemandProfile d;
  d.rates.assign(movement_count, {RateSegment{0.0, vph}});
  d.ignore_foe_prob = ignore_foe_prob;
  return d;
}

DemandProfile demand_from_json(const nlohmann::json& j, const IntersectionGeometry& g) {
  DemandProfile d;
  d.rates.assign(g.movements.size(), {});
  try {
    d.ignore_foe_prob = j.value("ignore_foe_prob", 0.0);
    d.seed = j.value("seed", std::uint64_t{0});
    const double scale = j.value("scale", 1.0);
    for (const auto& [name, jr] : j.at("rates").items()) {
      auto id = g.find(name);
      if (!id) throw ConfigError("demand.rates." + name, "unknown movement");
      auto& segs = d.rates[static_cast<std::size_t>(*id)];
      if (jr.is_number()) {
        segs.push_back({0.0, jr.get<double>() * scale});
      } else {
        for (const auto& seg : jr) segs.push_back({seg.at(0).get<double>(), seg.at(1).get<double>() * scale});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("demand", e.what());
  }
  d.validate(g.movements.size());
  return d;
}

nlohmann::json to_json(const DemandProfile& d, const IntersectionGeometry& g) {
  nlohmann::json rates = nlohmann::json::object();
  for (std::size_t m = 0; m < d.rates.size(); ++m) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : d.rates[m]) segs.push_back({s.start_s, s.vph});
    rates[g.movements[m].name] = segs;
  }
  return {{"ignore_foe_prob", d.ignore_foe_prob}, {"seed", d.seed}, {"rates", rates}};
}

}  // namespace safelight::sim
