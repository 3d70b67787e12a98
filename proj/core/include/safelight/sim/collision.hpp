#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "safelight/sim/geometry.hpp"
#include "safelight/sim/vehicle.hpp"

namespace safelight::sim {

struct CollisionEvent {
  double time_s = 0.0;
  std::uint64_t vehicle_a = 0;  // smaller id
  std::uint64_t vehicle_b = 0;
  MovementId movement_a = -1;
  MovementId movement_b = -1;
  double offset_a_m = 0.0;
  double offset_b_m = 0.0;
  Interval entry_interval_a = Interval::green;
  Interval entry_interval_b = Interval::green;

  bool during_change_interval() const {
    return entry_interval_a != Interval::green || entry_interval_b != Interval::green;
  }
};

// Fraction-of-tick window [lo, hi] during which the vehicle's occupancy zone
// (front within [offset - margin, offset + length + margin] on its path)
// covers the conflict point. The front moves linearly from prev_pos_m to pos_m.
std::optional<std::pair<double, double>> occupancy_window(const Vehicle& v, double offset_m, double approach_length_m,
                                                          double margin_m);

// Every pair of vehicles on conflicting movements whose occupancy windows
// overlap during the tick starting at t0. Sorted by time, then ids.
std::vector<CollisionEvent> detect_collisions(const IntersectionGeometry& g, std::span<const Vehicle> vehicles,
                                              double t0, double dt, double margin_m);

// Greedy earliest-first: each vehicle takes part in at most one event.
std::vector<CollisionEvent> resolve_collisions(const std::vector<CollisionEvent>& candidates);

}  // namespace safelight::sim
