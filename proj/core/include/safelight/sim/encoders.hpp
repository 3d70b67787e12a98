#pragma once

#include <span>
#include <vector>

#include "safelight/sim/geometry.hpp"
#include "safelight/sim/vehicle.hpp"

namespace safelight::sim {

inline constexpr double kQueueScale = 50.0;
inline constexpr double kWaitScale = 300.0;

// Per lane, cells from the approach entry to the stop line; each cell holds
// (occupied, speed / vmax) for the front-most vehicle whose front lies in it.
// Vehicles already inside the junction are not encoded.
std::size_t grid_length(const IntersectionGeometry& g);
std::vector<double> encode_state_grid(const IntersectionGeometry& g, std::span<const Vehicle> vehicles);

// Per lane: (stopped count / 50, max waiting among the stopped / 300).
std::size_t lane_feature_length(const IntersectionGeometry& g);
std::vector<double> encode_state_lane(const IntersectionGeometry& g, std::span<const Vehicle> vehicles,
                                      double stop_speed_mps = 0.1);

}  // namespace safelight::sim
