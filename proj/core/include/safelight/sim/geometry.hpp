#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace safelight::sim {

enum class Approach { north, east, south, west };
enum class TurnKind { through, left, right, u_turn };

const char* to_string(Approach a);
const char* to_string(TurnKind k);
Approach approach_from_string(const std::string& s);
TurnKind turn_from_string(const std::string& s);
Approach opposing(Approach a);

using MovementId = int;

struct ConflictPoint {
  MovementId foe = -1;
  double own_offset_m = 0.0;  // along own path from the stop line
  double foe_offset_m = 0.0;  // along the foe's path from its stop line
};

struct Movement {
  MovementId id = -1;
  std::string name;  // e.g. "EBL"
  int nema = 0;      // 1..8 for the signalized NEMA movements, 0 otherwise
  Approach approach = Approach::north;
  TurnKind kind = TurnKind::through;
  int lane = -1;
  double path_length_m = 0.0;
  std::vector<ConflictPoint> conflicts;

  bool left_like() const { return kind == TurnKind::left || kind == TurnKind::u_turn; }
  const ConflictPoint* conflict_with(MovementId foe) const;
};

struct Lane {
  int id = -1;
  Approach approach = Approach::north;
  std::vector<MovementId> movements;
};

struct IntersectionGeometry {
  std::string name;
  std::vector<Lane> lanes;
  std::vector<Movement> movements;
  double approach_length_m = 150.0;
  double cell_size_m = 7.5;
  double speed_limit_mps = 13.89;
  double detector_offset_m = 20.0;  // spot-speed detector, metres from approach entry

  // Throws ConfigError on any violated invariant.
  void validate() const;

  std::optional<MovementId> find(const std::string& name) const;
  MovementId require(const std::string& name) const;
  bool conflicts(MovementId a, MovementId b) const;
  std::size_t cells_per_lane() const;
  std::vector<int> lanes_of(Approach a) const;
};

IntersectionGeometry geometry_from_json(const nlohmann::json& j);
nlohmann::json to_json(const IntersectionGeometry& g);

}  // namespace safelight::sim
