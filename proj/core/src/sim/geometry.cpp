#include "safelight/sim/geometry.hpp"

#include <cmath>
#include <set>

#include "safelight/common/error.hpp"
#include "safelight/sim/signal_view.hpp"

namespace safelight::sim {

const char* to_string(Indication i) {
  switch (i) {
    case Indication::protected_green: return "protected_green";
    case Indication::permitted_green: return "permitted_green";
    case Indication::yellow: return "yellow";
    case Indication::red: return "red";
  }
  return "?";
}

const char* to_string(Interval i) {
  switch (i) {
    case Interval::green: return "green";
    case Interval::yellow: return "yellow";
    case Interval::all_red: return "all_red";
  }
  return "?";
}

const char* to_string(Approach a) {
  switch (a) {
    case Approach::north: return "N";
    case Approach::east: return "E";
    case Approach::south: return "S";
    case Approach::west: return "W";
  }
  return "?";
}

const char* to_string(TurnKind k) {
  switch (k) {
    case TurnKind::through: return "through";
    case TurnKind::left: return "left";
    case TurnKind::right: return "right";
    case TurnKind::u_turn: return "u_turn";
  }
  return "?";
}

Approach approach_from_string(const std::string& s) {
  if (s == "N") return Approach::north;
  if (s == "E") return Approach::east;
  if (s == "S") return Approach::south;
  if (s == "W") return Approach::west;
  throw ConfigError("approach", "unknown approach '" + s + "'");
}

TurnKind turn_from_string(const std::string& s) {
  if (s == "through") return TurnKind::through;
  if (s == "left") return TurnKind::left;
  if (s == "right") return TurnKind::right;
  if (s == "u_turn") return TurnKind::u_turn;
  throw ConfigError("kind", "unknown movement kind '" + s + "'");
}

Approach opposing(Approach a) {
  switch (a) {
    case Approach::north: return Approach::south;
    case Approach::east: return Approach::west;
    case Approach::south: return Approach::north;
    case Approach::west: return Approach::east;
  }
  return a;
}

const ConflictPoint* Movement::conflict_with(MovementId foe) const {
  for (const auto& c : conflicts)
    if (c.foe == foe) return &c;
  return nullptr;
}

void IntersectionGeometry::validate() const {
  if (approach_length_m <= 0) throw ConfigError("geometry.approach_length_m", "must be positive");
  if (cell_size_m <= 0) throw ConfigError("geometry.cell_size_m", "must be positive");
  if (speed_limit_mps <= 0) throw ConfigError("geometry.speed_limit_mps", "must be positive");
  std::set<std::string> names;
  for (std::size_t i = 0; i < movements.size(); ++i) {
    const auto& m = movements[i];
    const std::string field = "geometry.movements[" + m.name + "]";
    if (m.id != static_cast<MovementId>(i)) throw ConfigError(field, "ids must be dense indices");
    if (!names.insert(m.name).second) throw ConfigError(field, "duplicate movement name");
    if (m.lane < 0 || m.lane >= static_cast<int>(lanes.size())) throw ConfigError(field, "lane out of range");
    if (lanes[static_cast<std::size_t>(m.lane)].approach != m.approach)
      throw ConfigError(field, "lane belongs to another approach");
    if (m.path_length_m <= 0) throw ConfigError(field, "path_length_m must be positive");
    for (const auto& c : m.conflicts) {
      if (c.foe == m.id) throw ConfigError(field, "movement conflicts with itself");
      if (c.foe < 0 || c.foe >= static_cast<MovementId>(movements.size()))
        throw ConfigError(field, "conflict foe out of range");
      const auto* back = movements[static_cast<std::size_t>(c.foe)].conflict_with(m.id);
      if (back == nullptr || std::abs(back->own_offset_m - c.foe_offset_m) > 1e-9 ||
          std::abs(back->foe_offset_m - c.own_offset_m) > 1e-9)
        throw ConfigError(field, "conflict with " + movements[static_cast<std::size_t>(c.foe)].name +
                                     " is not symmetric");
    }
  }
  for (const auto& lane : lanes) {
    if (lane.movements.empty())
      throw ConfigError("geometry.lanes[" + std::to_string(lane.id) + "]", "lane serves no movement");
    for (auto mid : lane.movements)
      if (mid < 0 || mid >= static_cast<MovementId>(movements.size()) ||
          movements[static_cast<std::size_t>(mid)].lane != lane.id)
        throw ConfigError("geometry.lanes[" + std::to_string(lane.id) + "]", "inconsistent movement list");
  }
}

std::optional<MovementId> IntersectionGeometry::find(const std::string& n) const {
  for (const auto& m : movements)
    if (m.name == n) return m.id;
  return std::nullopt;
}

MovementId IntersectionGeometry::require(const std::string& n) const {
  auto id = find(n);
  if (!id) throw ConfigError("movement", "unknown movement '" + n + "'");
  return *id;
}

bool IntersectionGeometry::conflicts(MovementId a, MovementId b) const {
  return movements.at(static_cast<std::size_t>(a)).conflict_with(b) != nullptr;
}

std::size_t IntersectionGeometry::cells_per_lane() const {
  return static_cast<std::size_t>(std::ceil(approach_length_m / cell_size_m - 1e-9));
}

std::vector<int> IntersectionGeometry::lanes_of(Approach a) const {
  std::vector<int> out;
  for (const auto& l : lanes)
    if (l.approach == a) out.push_back(l.id);
  return out;
}

IntersectionGeometry geometry_from_json(const nlohmann::json& j) {
  IntersectionGeometry g;
  try {
    g.name = j.value("name", std::string{"intersection"});
    g.approach_length_m = j.at("approach_length_m").get<double>();
    g.cell_size_m = j.at("cell_size_m").get<double>();
    g.speed_limit_mps = j.at("speed_limit_mps").get<double>();
    g.detector_offset_m = j.value("detector_offset_m", 20.0);
    for (const auto& jl : j.at("lanes")) {
      Lane lane;
      lane.id = static_cast<int>(g.lanes.size());
      lane.approach = approach_from_string(jl.at("approach").get<std::string>());
      g.lanes.push_back(lane);
    }
    for (const auto& jm : j.at("movements")) {
      Movement m;
      m.id = static_cast<MovementId>(g.movements.size());
      m.name = jm.at("name").get<std::string>();
      m.nema = jm.value("nema", 0);
      m.approach = approach_from_string(jm.at("approach").get<std::string>());
      m.kind = turn_from_string(jm.at("kind").get<std::string>());
      m.lane = jm.at("lane").get<int>();
      m.path_length_m = jm.at("path_length_m").get<double>();
      g.movements.push_back(m);
      if (m.lane >= 0 && m.lane < static_cast<int>(g.lanes.size()))
        g.lanes[static_cast<std::size_t>(m.lane)].movements.push_back(m.id);
    }
    // Conflicts are declared once per unordered pair and mirrored here.
    for (const auto& jc : j.value("conflicts", nlohmann::json::array())) {
      const auto a = g.require(jc.at("a").get<std::string>());
      const auto b = g.require(jc.at("b").get<std::string>());
      const double oa = jc.at("offset_a_m").get<double>();
      const double ob = jc.at("offset_b_m").get<double>();
      g.movements[static_cast<std::size_t>(a)].conflicts.push_back({b, oa, ob});
      g.movements[static_cast<std::size_t>(b)].conflicts.push_back({a, ob, oa});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("geometry", e.what());
  }
  g.validate();
  return g;
}

nlohmann::json to_json(const IntersectionGeometry& g) {
  nlohmann::json lanes = nlohmann::json::array();
  for (const auto& l : g.lanes) lanes.push_back({{"approach", to_string(l.approach)}});
  nlohmann::json movements = nlohmann::json::array();
  nlohmann::json conflicts = nlohmann::json::array();
  for (const auto& m : g.movements) {
    movements.push_back({{"name", m.name},
                         {"nema", m.nema},
                         {"approach", to_string(m.approach)},
                         {"kind", to_string(m.kind)},
                         {"lane", m.lane},
                         {"path_length_m", m.path_length_m}});
    for (const auto& c : m.conflicts)
      if (c.foe > m.id)
        conflicts.push_back({{"a", m.name},
                             {"b", g.movements[static_cast<std::size_t>(c.foe)].name},
                             {"offset_a_m", c.own_offset_m},
                             {"offset_b_m", c.foe_offset_m}});
  }
  return {{"name", g.name},
          {"approach_length_m", g.approach_length_m},
          {"cell_size_m", g.cell_size_m},
          {"speed_limit_mps", g.speed_limit_mps},
          {"detector_offset_m", g.detector_offset_m},
          {"lanes", lanes},
          {"movements", movements},
          {"conflicts", conflicts}};
}

}  // namespace safelight::sim
