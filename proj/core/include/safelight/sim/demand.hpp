#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "safelight/sim/geometry.hpp"

namespace safelight::sim {

// Piecewise-constant rate: `vph` applies from `start_s` until the next segment.
struct RateSegment {
  double start_s = 0.0;
  double vph = 0.0;
};

struct DemandProfile {
  std::vector<std::vector<RateSegment>> rates;  // indexed by movement id
  double ignore_foe_prob = 0.0;
  std::uint64_t seed = 0;

  double rate_at(MovementId m, double t) const;
  void validate(std::size_t movement_count) const;

  static DemandProfile uniform(std::size_t movement_count, double vph, double ignore_foe_prob = 0.0);
};

// Rates keyed by movement name; movements not listed get rate 0.
DemandProfile demand_from_json(const nlohmann::json& j, const IntersectionGeometry& g);
nlohmann::json to_json(const DemandProfile& d, const IntersectionGeometry& g);

}  // namespace safelight::sim
