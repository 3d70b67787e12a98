#include "safelight/sim/collision.hpp"

#include <algorithm>
#include <tuple>

namespace safelight::sim {

std::optional<std::pair<double, double>> occupancy_window(const Vehicle& v, double offset_m, double approach_length_m,
                                                          double margin_m) {
  const double lo = offset_m - margin_m;
  const double hi = offset_m + v.length_m + margin_m;
  const double p0 = v.prev_pos_m - approach_length_m;
  const double p1 = v.pos_m - approach_length_m;
  if (p1 == p0) {
    if (p0 >= lo && p0 <= hi) return std::make_pair(0.0, 1.0);
    return std::nullopt;
  }
  // Positions only increase, so p1 > p0 here.
  if (p1 < lo || p0 > hi) return std::nullopt;
  const double span = p1 - p0;
  const double enter = std::clamp((lo - p0) / span, 0.0, 1.0);
  const double leave = std::clamp((hi - p0) / span, 0.0, 1.0);
  return std::make_pair(enter, leave);
}

std::vector<CollisionEvent> detect_collisions(const IntersectionGeometry& g, std::span<const Vehicle> vehicles,
                                              double t0, double dt, double margin_m) {
  const double L = g.approach_length_m;
  std::vector<std::vector<std::size_t>> by_movement(g.movements.size());
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    // Conflict offsets are inside the junction, so a vehicle whose front never
    // passed the stop line this tick cannot be involved.
    if (vehicles[i].pos_m - L < -margin_m) continue;
    by_movement[static_cast<std::size_t>(vehicles[i].movement)].push_back(i);
  }

  std::vector<CollisionEvent> out;
  for (const auto& m : g.movements) {
    const auto& mine = by_movement[static_cast<std::size_t>(m.id)];
    if (mine.empty()) continue;
    for (const auto& cp : m.conflicts) {
      if (cp.foe < m.id) continue;  // each unordered movement pair once
      const auto& theirs = by_movement[static_cast<std::size_t>(cp.foe)];
      for (auto i : mine) {
        auto wa = occupancy_window(vehicles[i], cp.own_offset_m, L, margin_m);
        if (!wa) continue;
        for (auto j : theirs) {
          auto wb = occupancy_window(vehicles[j], cp.foe_offset_m, L, margin_m);
          if (!wb) continue;
          const double start = std::max(wa->first, wb->first);
          const double end = std::min(wa->second, wb->second);
          if (start > end) continue;
          CollisionEvent e;
          e.time_s = t0 + start * dt;
          const Vehicle* a = &vehicles[i];
          const Vehicle* b = &vehicles[j];
          double oa = cp.own_offset_m, ob = cp.foe_offset_m;
          if (b->id < a->id) {
            std::swap(a, b);
            std::swap(oa, ob);
          }
          e.vehicle_a = a->id;
          e.vehicle_b = b->id;
          e.movement_a = a->movement;
          e.movement_b = b->movement;
          e.offset_a_m = oa;
          e.offset_b_m = ob;
          e.entry_interval_a = a->entry_interval;
          e.entry_interval_b = b->entry_interval;
          out.push_back(e);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CollisionEvent& x, const CollisionEvent& y) {
    return std::tie(x.time_s, x.vehicle_a, x.vehicle_b) < std::tie(y.time_s, y.vehicle_a, y.vehicle_b);
  });
  return out;
}

std::vector<CollisionEvent> resolve_collisions(const std::vector<CollisionEvent>& candidates) {
  std::vector<CollisionEvent> out;
  std::vector<std::uint64_t> used;
  auto taken = [&](std::uint64_t id) { return std::find(used.begin(), used.end(), id) != used.end(); };
  for (const auto& e : candidates) {
    if (taken(e.vehicle_a) || taken(e.vehicle_b)) continue;
    used.push_back(e.vehicle_a);
    used.push_back(e.vehicle_b);
    out.push_back(e);
  }
  return out;
}

}  // namespace safelight::sim
