#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "safelight/common/rng.hpp"
#include "safelight/sim/collision.hpp"
#include "safelight/sim/demand.hpp"
#include "safelight/sim/geometry.hpp"
#include "safelight/sim/metrics.hpp"
#include "safelight/sim/signal_view.hpp"
#include "safelight/sim/vehicle.hpp"

namespace safelight::sim {

class EventLog;

struct SimConfig {
  double dt_s = 1.0;
  double tau_s = 1.0;
  double accel_mps2 = 2.6;
  double decel_mps2 = 4.5;
  double length_m = 5.0;
  double min_gap_m = 2.0;
  double speed_factor_sd = 0.1;  // vmax = speed limit * N(1, sd), clamped to [0.8, 1.2]
  double gap_accept_s = 4.0;
  double emergency_decel_mps2 = 9.0;  // yielding is skipped only past this braking distance
  double collision_margin_m = 0.5;
  double stop_speed_mps = 0.1;
  double spawn_gap_m = 2.0;
  double dawdle_sigma = 0.0;

  void validate() const;
};

SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& c);

// One opposing-speed observation: a vehicle front crossing the approach detector.
struct SpotSample {
  double time_s = 0.0;
  MovementId movement = -1;
  double speed_mps = 0.0;
};

struct SimState {
  double time_s = 0.0;
  std::vector<Vehicle> vehicles;  // ordered by id
  MetricsLedger ledger;
  std::uint64_t next_id = 1;
  std::uint64_t spawned = 0;
  std::uint64_t exited = 0;
  std::uint64_t collided = 0;  // vehicles removed by collisions (two per event)
};

struct StepResult {
  std::vector<CollisionEvent> collisions;
  std::vector<std::uint64_t> spawned;
  std::vector<std::uint64_t> exited;
  std::vector<SpotSample> spot_samples;
};

// Arrivals for one tick. One Bernoulli(rate*dt/3600) draw per movement; at
// most one vehicle per lane; a blocked lane entry drops the arrival and
// increments *blocked.
std::vector<Vehicle> spawn_vehicles(const IntersectionGeometry& g, const DemandProfile& demand, const SimConfig& cfg,
                                    const std::vector<Vehicle>& present, double t, double dt, Rng& rng,
                                    std::uint64_t& next_id, std::uint64_t* blocked = nullptr);

class Simulator {
 public:
  Simulator(std::shared_ptr<const IntersectionGeometry> geometry, DemandProfile demand, SimConfig config,
            std::uint64_t seed);

  StepResult step(const SignalView& signal);

  const SimState& state() const { return state_; }
  const IntersectionGeometry& geometry() const { return *geometry_; }
  const SimConfig& config() const { return config_; }
  const DemandProfile& demand() const { return demand_; }

  // Scripted scenarios and tests place vehicles directly.
  Vehicle& add_vehicle(Vehicle v);
  Vehicle make_vehicle(MovementId m, double pos_m, double speed_mps, bool ignores_foes = false);

  void set_event_log(EventLog* log) { log_ = log; }
  // Writes the closing record (waiting of vehicles still present).
  void finish();

 private:
  bool must_stop(Vehicle& v, const SignalView& signal, const std::vector<Vehicle>& before,
                 const std::vector<std::vector<std::size_t>>& by_movement) const;
  bool junction_blocked(const Vehicle& v, const std::vector<Vehicle>& before,
                        const std::vector<std::vector<std::size_t>>& by_movement) const;
  bool gap_rejected(const Vehicle& v, const SignalView& signal, const std::vector<Vehicle>& before,
                    const std::vector<std::vector<std::size_t>>& by_movement) const;

  std::shared_ptr<const IntersectionGeometry> geometry_;
  DemandProfile demand_;
  SimConfig config_;
  Rng rng_;
  SimState state_;
  EventLog* log_ = nullptr;
};

}  // namespace safelight::sim
