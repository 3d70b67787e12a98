#include "safelight/sim/event_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "safelight/common/error.hpp"

namespace safelight::sim {

namespace {

Interval interval_from_string(const std::string& s) {
  if (s == "green") return Interval::green;
  if (s == "yellow") return Interval::yellow;
  if (s == "all_red") return Interval::all_red;
  throw ConfigError("interval", "unknown interval '" + s + "'");
}

}  // namespace

void EventLog::spawn(double t, const Vehicle& v) {
  records_.push_back({{"type", "spawn"},
                      {"t", t},
                      {"id", v.id},
                      {"movement", v.movement},
                      {"lane", v.lane},
                      {"ignores_foes", v.ignores_foes}});
}

void EventLog::exit(double t, const Vehicle& v) {
  records_.push_back({{"type", "exit"}, {"t", t}, {"id", v.id}, {"waiting_s", v.waiting_s}});
}

void EventLog::collision(const CollisionEvent& e, double waiting_a, double waiting_b) {
  records_.push_back({{"type", "collision"},
                      {"t", e.time_s},
                      {"a", e.vehicle_a},
                      {"b", e.vehicle_b},
                      {"movement_a", e.movement_a},
                      {"movement_b", e.movement_b},
                      {"offset_a_m", e.offset_a_m},
                      {"offset_b_m", e.offset_b_m},
                      {"entry_a", to_string(e.entry_interval_a)},
                      {"entry_b", to_string(e.entry_interval_b)},
                      {"waiting_a", waiting_a},
                      {"waiting_b", waiting_b}});
}

void EventLog::signal_change(double t, int phase, Interval interval) {
  records_.push_back({{"type", "signal"}, {"t", t}, {"phase", phase}, {"interval", to_string(interval)}});
}

void EventLog::tick(double t0, double dt, std::span<const Vehicle> vehicles, std::uint64_t stopped) {
  nlohmann::json rec = {{"type", "tick"}, {"t", t0}, {"dt", dt}, {"stopped", stopped}};
  if (record_vehicles_) {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : vehicles)
      vs.push_back({v.id, v.movement, v.prev_pos_m, v.pos_m, v.speed_mps, v.length_m,
                    to_string(v.entry_interval)});
    rec["vehicles"] = std::move(vs);
  }
  records_.push_back(std::move(rec));
}

void EventLog::end(double t, std::span<const Vehicle> present) {
  nlohmann::json waits = nlohmann::json::array();
  for (const auto& v : present) waits.push_back({v.id, v.waiting_s});
  records_.push_back({{"type", "end"}, {"t", t}, {"present", waits}});
}

void EventLog::write(std::ostream& os) const {
  for (const auto& r : records_) os << r.dump() << '\n';
}

void EventLog::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write(os);
}

std::vector<nlohmann::json> EventLog::read(std::istream& is) {
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

std::vector<nlohmann::json> EventLog::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return read(is);
}

std::vector<Vehicle> vehicles_from_tick(const nlohmann::json& rec) {
  std::vector<Vehicle> out;
  for (const auto& jv : rec.at("vehicles")) {
    Vehicle v;
    v.id = jv.at(0).get<std::uint64_t>();
    v.movement = jv.at(1).get<int>();
    v.prev_pos_m = jv.at(2).get<double>();
    v.pos_m = jv.at(3).get<double>();
    v.speed_mps = jv.at(4).get<double>();
    v.length_m = jv.at(5).get<double>();
    v.entry_interval = interval_from_string(jv.at(6).get<std::string>());
    out.push_back(v);
  }
  return out;
}

ReplayReport replay_collisions(const IntersectionGeometry& g, const std::vector<nlohmann::json>& records,
                               double margin_m) {
  ReplayReport rep;
  std::vector<const nlohmann::json*> logged;
  for (const auto& r : records)
    if (r.at("type") == "collision") logged.push_back(&r);
  rep.logged = logged.size();
  std::size_t next = 0;
  for (const auto& r : records) {
    if (r.at("type") != "tick") continue;
    if (!r.contains("vehicles")) throw ConfigError("event log", "tick records carry no vehicle snapshots");
    ++rep.ticks;
    const double t0 = r.at("t").get<double>();
    const double dt = r.at("dt").get<double>();
    const auto vehicles = vehicles_from_tick(r);
    for (const auto& e : resolve_collisions(detect_collisions(g, vehicles, t0, dt, margin_m))) {
      ++rep.recomputed;
      const bool match = next < logged.size() && logged[next]->at("a").get<std::uint64_t>() == e.vehicle_a &&
                         logged[next]->at("b").get<std::uint64_t>() == e.vehicle_b &&
                         logged[next]->at("t").get<double>() == e.time_s;
      if (!match) {
        rep.mismatches.push_back("t=" + std::to_string(e.time_s) + " vehicles " + std::to_string(e.vehicle_a) + "/" +
                                 std::to_string(e.vehicle_b) + " not in the log at this position");
      }
      ++next;
    }
  }
  if (rep.recomputed != rep.logged)
    rep.mismatches.push_back("log has " + std::to_string(rep.logged) + " collisions, detector found " +
                             std::to_string(rep.recomputed));
  return rep;
}

}  // namespace safelight::sim
