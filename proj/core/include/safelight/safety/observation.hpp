#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "safelight/sim/demand.hpp"
#include "safelight/sim/geometry.hpp"
#include "safelight/sim/signal_view.hpp"
#include "safelight/sim/simulator.hpp"
#include "safelight/sim/vehicle.hpp"

namespace safelight::safety {

using sim::MovementId;

enum class LeftMode { protected_mode, permitted, prohibited };

struct ApproachingFoe {
  MovementId movement = -1;
  double distance_m = 0.0;  // front bumper to the conflict point
  double speed_mps = 0.0;
  double accel_mps2 = 0.0;
  double vmax_mps = 0.0;
};

// Everything the rules see about one left-like movement.
struct LeftObservation {
  MovementId movement = -1;
  std::vector<MovementId> opposing_through;
  std::vector<ApproachingFoe> foes;  // opposing-through vehicles short of the conflict point
  std::optional<double> speed_85th_mps;
  int opposing_through_lanes = 0;  // lanes serving an opposing through with nonzero demand
  LeftMode mode = LeftMode::prohibited;
};

struct SafetyObservation {
  double time_s = 0.0;
  std::vector<LeftObservation> lefts;
  std::size_t movement_count = 0;
};

// Nearest-rank percentile of a non-empty sample; p in (0, 100].
double nearest_rank_percentile(std::vector<double> values, double p);

// Keeps the rolling detector window and turns simulator snapshots into observations.
class SafetyObserver {
 public:
  SafetyObserver(std::shared_ptr<const sim::IntersectionGeometry> geometry, double window_s = 300.0);

  void record(std::span<const sim::SpotSample> samples);
  void reset();

  SafetyObservation observe(std::span<const sim::Vehicle> vehicles, double t, const sim::DemandProfile& demand,
                            const sim::SignalView* current = nullptr) const;

  double window_s() const { return window_s_; }
  std::size_t samples_in_window(MovementId m, double t) const;

 private:
  struct Sample {
    double time_s;
    double speed_mps;
  };
  std::shared_ptr<const sim::IntersectionGeometry> geometry_;
  double window_s_;
  std::vector<std::deque<Sample>> samples_;  // per movement, time-ordered
  std::vector<std::vector<MovementId>> opposing_;  // per left-like movement
};

}  // namespace safelight::safety
