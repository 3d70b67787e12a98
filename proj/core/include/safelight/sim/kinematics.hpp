#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace safelight::sim {

// Krauss safe velocity: the largest speed from which a vehicle can still stop
// behind a leader driving at v_lead, given `gap` metres of free space.
inline double safe_velocity(double gap, double v_lead, double decel, double tau) {
  const double bt = decel * tau;
  return -bt + std::sqrt(bt * bt + v_lead * v_lead + 2.0 * decel * std::max(gap, 0.0));
}

inline double braking_distance(double v, double decel) { return v * v / (2.0 * decel); }

// Time to cover `dist` metres starting at v0, accelerating at `accel` until vmax.
inline double time_to_cover(double dist, double v0, double accel, double vmax) {
  if (dist <= 0.0) return 0.0;
  if (accel <= 0.0 || v0 >= vmax) {
    const double v = std::min(v0, vmax);
    return v > 0.0 ? dist / v : std::numeric_limits<double>::infinity();
  }
  const double t1 = (vmax - v0) / accel;
  const double d1 = v0 * t1 + 0.5 * accel * t1 * t1;
  if (dist <= d1) return (-v0 + std::sqrt(v0 * v0 + 2.0 * accel * dist)) / accel;
  return t1 + (dist - d1) / vmax;
}

inline double time_at_constant_speed(double dist, double v) {
  if (dist <= 0.0) return 0.0;
  return v > 0.0 ? dist / v : std::numeric_limits<double>::infinity();
}

}  // namespace safelight::sim
