#pragma once

#include <cstdint>

#include "safelight/sim/geometry.hpp"
#include "safelight/sim/signal_view.hpp"

namespace safelight::sim {

struct Vehicle {
  std::uint64_t id = 0;
  MovementId movement = -1;
  int lane = -1;
  double pos_m = 0.0;  // front bumper, metres from approach entry
  double prev_pos_m = 0.0;
  double speed_mps = 0.0;
  double vmax_mps = 0.0;
  double accel_mps2 = 2.6;
  double decel_mps2 = 4.5;
  double length_m = 5.0;
  double waiting_s = 0.0;
  double entered_at_s = 0.0;
  bool ignores_foes = false;

  // Set when the vehicle could not stop at yellow onset and keeps going.
  bool committed = false;
  double junction_entry_s = -1.0;
  Interval entry_interval = Interval::green;
  Indication entry_indication = Indication::red;

  bool in_junction(double approach_length) const { return pos_m > approach_length; }
  double path_pos(double approach_length) const { return pos_m - approach_length; }
};

}  // namespace safelight::sim
