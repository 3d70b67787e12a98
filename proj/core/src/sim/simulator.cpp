#include "safelight/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "safelight/common/error.hpp"
#include "safelight/sim/event_log.hpp"
#include "safelight/sim/kinematics.hpp"

namespace safelight::sim {

void SimConfig::validate() const {
  if (dt_s != 1.0 && dt_s != 0.5) throw ConfigError("sim.dt_s", "must be 0.5 or 1");
  if (!(tau_s > 0)) throw ConfigError("sim.tau_s", "must be positive");
  if (!(accel_mps2 > 0)) throw ConfigError("sim.accel_mps2", "must be positive");
  if (!(decel_mps2 > 0)) throw ConfigError("sim.decel_mps2", "must be positive");
  if (!(length_m > 0)) throw ConfigError("sim.length_m", "must be positive");
  if (min_gap_m < 0) throw ConfigError("sim.min_gap_m", "must be >= 0");
  if (speed_factor_sd < 0) throw ConfigError("sim.speed_factor_sd", "must be >= 0");
  if (gap_accept_s < 0) throw ConfigError("sim.gap_accept_s", "must be >= 0");
  if (emergency_decel_mps2 < decel_mps2)
    throw ConfigError("sim.emergency_decel_mps2", "must be >= decel_mps2");
  if (collision_margin_m < 0) throw ConfigError("sim.collision_margin_m", "must be >= 0");
  if (dawdle_sigma < 0 || dawdle_sigma > 1) throw ConfigError("sim.dawdle_sigma", "must lie in [0,1]");
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig c;
  try {
    c.dt_s = j.value("dt_s", c.dt_s);
    c.tau_s = j.value("tau_s", c.tau_s);
    c.accel_mps2 = j.value("accel_mps2", c.accel_mps2);
    c.decel_mps2 = j.value("decel_mps2", c.decel_mps2);
    c.length_m = j.value("length_m", c.length_m);
    c.min_gap_m = j.value("min_gap_m", c.min_gap_m);
    c.speed_factor_sd = j.value("speed_factor_sd", c.speed_factor_sd);
    c.gap_accept_s = j.value("gap_accept_s", c.gap_accept_s);
    c.emergency_decel_mps2 = j.value("emergency_decel_mps2", c.emergency_decel_mps2);
    c.collision_margin_m = j.value("collision_margin_m", c.collision_margin_m);
    c.stop_speed_mps = j.value("stop_speed_mps", c.stop_speed_mps);
    c.spawn_gap_m = j.value("spawn_gap_m", c.spawn_gap_m);
    c.dawdle_sigma = j.value("dawdle_sigma", c.dawdle_sigma);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("sim", e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const SimConfig& c) {
  return {{"dt_s", c.dt_s},
          {"tau_s", c.tau_s},
          {"accel_mps2", c.accel_mps2},
          {"decel_mps2", c.decel_mps2},
          {"length_m", c.length_m},
          {"min_gap_m", c.min_gap_m},
          {"speed_factor_sd", c.speed_factor_sd},
          {"gap_accept_s", c.gap_accept_s},
          {"emergency_decel_mps2", c.emergency_decel_mps2},
          {"collision_margin_m", c.collision_margin_m},
          {"stop_speed_mps", c.stop_speed_mps},
          {"spawn_gap_m", c.spawn_gap_m},
          {"dawdle_sigma", c.dawdle_sigma}};
}

std::vector<Vehicle> spawn_vehicles(const IntersectionGeometry& g, const DemandProfile& demand, const SimConfig& cfg,
                                    const std::vector<Vehicle>& present, double t, double dt, Rng& rng,
                                    std::uint64_t& next_id, std::uint64_t* blocked) {
  std::vector<Vehicle> out;
  // Rear-most vehicle per lane decides whether the entry is free.
  std::vector<const Vehicle*> last(g.lanes.size(), nullptr);
  for (const auto& v : present) {
    auto& slot = last[static_cast<std::size_t>(v.lane)];
    if (slot == nullptr || v.pos_m < slot->pos_m) slot = &v;
  }
  for (const auto& lane : g.lanes) {
    MovementId chosen = -1;
    for (auto m : lane.movements) {
      const double p = demand.rate_at(m, t) * dt / 3600.0;
      const bool hit = rng.bernoulli(p);
      if (hit && chosen < 0) chosen = m;
    }
    if (chosen < 0) continue;
    const bool ignores = rng.bernoulli(demand.ignore_foe_prob);
    const double factor = std::clamp(rng.normal(1.0, cfg.speed_factor_sd), 0.8, 1.2);
    const Vehicle* tail = last[static_cast<std::size_t>(lane.id)];
    const double free_space = tail ? tail->pos_m - tail->length_m : std::numeric_limits<double>::infinity();
    if (free_space < cfg.length_m + cfg.spawn_gap_m) {
      if (blocked) ++*blocked;
      continue;
    }
    Vehicle v;
    v.id = next_id++;
    v.movement = chosen;
    v.lane = lane.id;
    v.vmax_mps = g.speed_limit_mps * factor;
    v.accel_mps2 = cfg.accel_mps2;
    v.decel_mps2 = cfg.decel_mps2;
    v.length_m = cfg.length_m;
    v.entered_at_s = t;
    v.ignores_foes = ignores;
    v.speed_mps = v.vmax_mps;
    if (tail)
      v.speed_mps = std::min(v.speed_mps, std::max(0.0, safe_velocity(free_space - cfg.min_gap_m, tail->speed_mps,
                                                                      cfg.decel_mps2, cfg.tau_s)));
    out.push_back(v);
  }
  return out;
}

Simulator::Simulator(std::shared_ptr<const IntersectionGeometry> geometry, DemandProfile demand, SimConfig config,
                     std::uint64_t seed)
    : geometry_(std::move(geometry)), demand_(std::move(demand)), config_(config), rng_(seed) {
  if (!geometry_) throw ConfigError("geometry", "missing");
  config_.validate();
  demand_.validate(geometry_->movements.size());
  state_.ledger.lane_queue.assign(geometry_->lanes.size(), 0);
  state_.ledger.lane_max_wait.assign(geometry_->lanes.size(), 0.0);
}

Vehicle Simulator::make_vehicle(MovementId m, double pos_m, double speed_mps, bool ignores_foes) {
  const auto& mv = geometry_->movements.at(static_cast<std::size_t>(m));
  Vehicle v;
  v.movement = m;
  v.lane = mv.lane;
  v.pos_m = pos_m;
  v.prev_pos_m = pos_m;
  v.vmax_mps = geometry_->speed_limit_mps;
  v.speed_mps = std::min(speed_mps, v.vmax_mps);
  v.accel_mps2 = config_.accel_mps2;
  v.decel_mps2 = config_.decel_mps2;
  v.length_m = config_.length_m;
  v.entered_at_s = state_.time_s;
  v.ignores_foes = ignores_foes;
  return v;
}

Vehicle& Simulator::add_vehicle(Vehicle v) {
  v.id = state_.next_id++;
  if (v.pos_m > geometry_->approach_length_m && v.junction_entry_s < 0) v.junction_entry_s = state_.time_s;
  state_.vehicles.push_back(v);
  ++state_.spawned;
  ++state_.ledger.entered;
  if (log_) log_->spawn(state_.time_s, v);
  return state_.vehicles.back();
}

bool Simulator::junction_blocked(const Vehicle& v, const std::vector<Vehicle>& before,
                                 const std::vector<std::vector<std::size_t>>& by_movement) const {
  const auto& g = *geometry_;
  const double L = g.approach_length_m;
  for (const auto& cp : g.movements[static_cast<std::size_t>(v.movement)].conflicts) {
    for (auto j : by_movement[static_cast<std::size_t>(cp.foe)]) {
      const auto& w = before[j];
      if (w.in_junction(L)) {
        if (w.path_pos(L) <= cp.foe_offset_m + w.length_m + config_.collision_margin_m) return true;
      } else if (w.committed && !g.movements[static_cast<std::size_t>(cp.foe)].left_like()) {
        // Committed lefts still yield themselves, so only committed through
        // and right traffic holds the junction.
        return true;
      }
    }
  }
  return false;
}

bool Simulator::gap_rejected(const Vehicle& v, const SignalView& signal, const std::vector<Vehicle>& before,
                             const std::vector<std::vector<std::size_t>>& by_movement) const {
  const auto& g = *geometry_;
  const double L = g.approach_length_m;
  for (const auto& cp : g.movements[static_cast<std::size_t>(v.movement)].conflicts) {
    const auto& foe = g.movements[static_cast<std::size_t>(cp.foe)];
    if (foe.kind != TurnKind::through) continue;
    const bool foe_red = signal.indications[static_cast<std::size_t>(cp.foe)] == Indication::red;
    for (auto j : by_movement[static_cast<std::size_t>(cp.foe)]) {
      const auto& w = before[j];
      const bool inside = w.in_junction(L);
      if (!inside && foe_red && !w.committed) continue;
      const double dist = cp.foe_offset_m - w.path_pos(L);
      if (dist < 0.0) continue;  // past the conflict point; clearance is junction_blocked's job
      // Foes may be queued at the line, so arrival assumes they accelerate.
      if (time_to_cover(dist, w.speed_mps, w.accel_mps2, w.vmax_mps) < config_.gap_accept_s) return true;
    }
  }
  return false;
}

bool Simulator::must_stop(Vehicle& v, const SignalView& signal, const std::vector<Vehicle>& before,
                          const std::vector<std::vector<std::size_t>>& by_movement) const {
  const double dist = geometry_->approach_length_m - v.pos_m;
  const double bd = braking_distance(v.speed_mps, v.decel_mps2);
  const auto ind = signal.indications[static_cast<std::size_t>(v.movement)];
  switch (ind) {
    case Indication::red:
      if (!v.committed) return true;
      break;
    case Indication::yellow:
      if (!v.committed) {
        if (dist >= bd) return true;
        v.committed = true;
      }
      break;
    case Indication::protected_green:
    case Indication::permitted_green:
      v.committed = false;
      break;
  }
  if (v.ignores_foes) return false;
  // Too close to stop even with hard braking: the driver carries on. A car
  // creeping up to the line can always stop.
  if (v.speed_mps > config_.stop_speed_mps && dist < braking_distance(v.speed_mps, config_.emergency_decel_mps2))
    return false;
  if (junction_blocked(v, before, by_movement)) return true;
  // A left that got in on yellow still has to find a gap in the opposing flow.
  const bool gap_needed = ind == Indication::permitted_green ||
                          (ind != Indication::protected_green &&
                           geometry_->movements[static_cast<std::size_t>(v.movement)].left_like());
  if (gap_needed && gap_rejected(v, signal, before, by_movement)) return true;
  return false;
}

StepResult Simulator::step(const SignalView& signal) {
  const auto& g = *geometry_;
  if (signal.indications.size() != g.movements.size())
    throw DimensionError("signal indications", g.movements.size(), signal.indications.size());
  const double dt = config_.dt_s;
  const double t0 = state_.time_s;
  const double L = g.approach_length_m;
  auto& ledger = state_.ledger;
  auto& vs = state_.vehicles;
  StepResult out;

  auto fresh = spawn_vehicles(g, demand_, config_, vs, t0, dt, rng_, state_.next_id, &ledger.blocked_spawns);
  for (auto& v : fresh) {
    ++state_.spawned;
    ++ledger.entered;
    out.spawned.push_back(v.id);
    if (log_) log_->spawn(t0, v);
    vs.push_back(v);
  }

  // Yielding decisions look at where everyone was at the start of the tick.
  const std::vector<Vehicle> before = vs;
  std::vector<std::vector<std::size_t>> by_movement(g.movements.size());
  std::vector<std::vector<std::size_t>> by_lane(g.lanes.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    by_movement[static_cast<std::size_t>(vs[i].movement)].push_back(i);
    by_lane[static_cast<std::size_t>(vs[i].lane)].push_back(i);
  }

  for (auto& order : by_lane) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (vs[a].pos_m != vs[b].pos_m) return vs[a].pos_m > vs[b].pos_m;
      return vs[a].id < vs[b].id;
    });
    const Vehicle* leader = nullptr;  // already moved this tick
    for (auto i : order) {
      Vehicle& v = vs[i];
      double cap = std::min(v.speed_mps + v.accel_mps2 * dt, v.vmax_mps);
      if (leader) {
        const double space = leader->pos_m - leader->length_m - v.pos_m;
        cap = std::min(cap, safe_velocity(space - config_.min_gap_m, leader->speed_mps, v.decel_mps2, config_.tau_s));
        cap = std::min(cap, std::max(0.0, space / dt));
      }
      if (!v.in_junction(L) && must_stop(v, signal, before, by_movement)) {
        const double dist = L - v.pos_m;
        cap = std::min(cap, safe_velocity(dist, 0.0, v.decel_mps2, config_.tau_s));
        cap = std::min(cap, std::max(0.0, dist / dt));
      }
      if (config_.dawdle_sigma > 0.0) cap -= config_.dawdle_sigma * v.accel_mps2 * dt * rng_.uniform();
      const double nv = std::clamp(cap, 0.0, v.vmax_mps);
      v.prev_pos_m = v.pos_m;
      v.speed_mps = nv;
      v.pos_m += nv * dt;
      leader = &v;
    }
  }

  for (auto& v : vs) {
    if (v.prev_pos_m <= L && v.pos_m > L) {
      v.junction_entry_s = t0;
      v.entry_interval = signal.interval;
      v.entry_indication = signal.indications[static_cast<std::size_t>(v.movement)];
    }
    if (v.prev_pos_m < g.detector_offset_m && v.pos_m >= g.detector_offset_m)
      out.spot_samples.push_back({t0 + dt, v.movement, v.speed_mps});
    if (v.speed_mps < config_.stop_speed_mps) {
      v.waiting_s += dt;
      ledger.cumulative_waiting_s += dt;
    }
  }

  std::vector<bool> gone(vs.size(), false);
  auto index_of = [&](std::uint64_t id) {
    auto it = std::lower_bound(vs.begin(), vs.end(), id, [](const Vehicle& v, std::uint64_t x) { return v.id < x; });
    return static_cast<std::size_t>(it - vs.begin());
  };
  for (const auto& e : resolve_collisions(detect_collisions(g, vs, t0, dt, config_.collision_margin_m))) {
    const auto ia = index_of(e.vehicle_a);
    const auto ib = index_of(e.vehicle_b);
    gone[ia] = gone[ib] = true;
    ++ledger.collisions;
    if (e.during_change_interval()) ++ledger.change_interval_collisions;
    state_.collided += 2;
    if (log_) log_->collision(e, vs[ia].waiting_s, vs[ib].waiting_s);
    out.collisions.push_back(e);
  }
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (gone[i]) continue;
    const auto& v = vs[i];
    if (v.path_pos(L) >= g.movements[static_cast<std::size_t>(v.movement)].path_length_m + v.length_m) {
      gone[i] = true;
      ++ledger.throughput;
      ++state_.exited;
      out.exited.push_back(v.id);
      if (log_) log_->exit(t0 + dt, v);
    }
  }

  std::fill(ledger.lane_queue.begin(), ledger.lane_queue.end(), 0);
  std::fill(ledger.lane_max_wait.begin(), ledger.lane_max_wait.end(), 0.0);
  std::uint64_t stopped = 0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (gone[i]) continue;
    const auto& v = vs[i];
    if (v.speed_mps >= config_.stop_speed_mps) continue;
    ++stopped;
    if (!v.in_junction(L)) {
      const auto lane = static_cast<std::size_t>(v.lane);
      ++ledger.lane_queue[lane];
      ledger.lane_max_wait[lane] = std::max(ledger.lane_max_wait[lane], v.waiting_s);
    }
  }
  ledger.stopped_now = stopped;
  ledger.stopped_sum += static_cast<double>(stopped);
  ++ledger.ticks;
  if (log_) log_->tick(t0, dt, vs, stopped);

  std::size_t w = 0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (!gone[i]) vs[w++] = vs[i];
  vs.resize(w);
  state_.time_s = t0 + dt;
  return out;
}

void Simulator::finish() {
  if (log_) log_->end(state_.time_s, state_.vehicles);
}

}  // namespace safelight::sim
