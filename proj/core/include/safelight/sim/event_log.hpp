#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safelight/sim/collision.hpp"
#include "safelight/sim/geometry.hpp"
#include "safelight/sim/vehicle.hpp"

namespace safelight::sim {

// Line-delimited JSON records. Every record carries "type" and "t".
// Types: spawn, exit, collision, signal, tick, end.
class EventLog {
 public:
  explicit EventLog(bool record_vehicles = false) : record_vehicles_(record_vehicles) {}

  void spawn(double t, const Vehicle& v);
  void exit(double t, const Vehicle& v);
  void collision(const CollisionEvent& e, double waiting_a, double waiting_b);
  void signal_change(double t, int phase, Interval interval);
  // Per-tick summary; with record_vehicles the full kinematic snapshot is kept
  // so the collision detector can be re-run offline.
  void tick(double t0, double dt, std::span<const Vehicle> vehicles, std::uint64_t stopped);
  void end(double t, std::span<const Vehicle> present);

  const std::vector<nlohmann::json>& records() const { return records_; }
  bool record_vehicles() const { return record_vehicles_; }
  void clear() { records_.clear(); }

  void write(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;
  static std::vector<nlohmann::json> read(std::istream& is);
  static std::vector<nlohmann::json> load(const std::filesystem::path& path);

 private:
  bool record_vehicles_;
  std::vector<nlohmann::json> records_;
};

// Rebuild the vehicles of one recorded tick, enough for collision detection.
std::vector<Vehicle> vehicles_from_tick(const nlohmann::json& tick_record);

struct ReplayReport {
  std::size_t ticks = 0;
  std::size_t logged = 0;      // collision records in the log
  std::size_t recomputed = 0;  // collisions found by re-running the detector
  std::vector<std::string> mismatches;
  bool consistent() const { return mismatches.empty() && logged == recomputed; }
};

// Re-runs the collision detector over every recorded tick snapshot and checks
// the result against the logged collision records. Needs a log written with
// record_vehicles.
ReplayReport replay_collisions(const IntersectionGeometry& g, const std::vector<nlohmann::json>& records,
                               double margin_m);

}  // namespace safelight::sim
