#include "safelight/safety/observation.hpp"

#include <algorithm>
#include <cmath>

#include "safelight/common/error.hpp"

namespace safelight::safety {

double nearest_rank_percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("percentile of an empty sample");
  if (!(p > 0.0 && p <= 100.0)) throw Error("percentile must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n) - 1e-12));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

SafetyObserver::SafetyObserver(std::shared_ptr<const sim::IntersectionGeometry> geometry, double window_s)
    : geometry_(std::move(geometry)), window_s_(window_s) {
  if (!(window_s_ > 0)) throw ConfigError("safety.window_s", "must be positive");
  const auto& g = *geometry_;
  samples_.resize(g.movements.size());
  opposing_.resize(g.movements.size());
  for (const auto& m : g.movements) {
    if (!m.left_like()) continue;
    for (const auto& cp : m.conflicts) {
      const auto& foe = g.movements[static_cast<std::size_t>(cp.foe)];
      if (foe.kind == sim::TurnKind::through && foe.approach == sim::opposing(m.approach))
        opposing_[static_cast<std::size_t>(m.id)].push_back(foe.id);
    }
  }
}

void SafetyObserver::record(std::span<const sim::SpotSample> samples) {
  for (const auto& s : samples) {
    auto& d = samples_[static_cast<std::size_t>(s.movement)];
    d.push_back({s.time_s, s.speed_mps});
    while (!d.empty() && d.front().time_s <= s.time_s - window_s_) d.pop_front();
  }
}

void SafetyObserver::reset() {
  for (auto& d : samples_) d.clear();
}

std::size_t SafetyObserver::samples_in_window(MovementId m, double t) const {
  std::size_t n = 0;
  for (const auto& s : samples_[static_cast<std::size_t>(m)])
    if (s.time_s > t - window_s_ && s.time_s <= t) ++n;
  return n;
}

SafetyObservation SafetyObserver::observe(std::span<const sim::Vehicle> vehicles, double t,
                                          const sim::DemandProfile& demand, const sim::SignalView* current) const {
  const auto& g = *geometry_;
  const double L = g.approach_length_m;
  SafetyObservation obs;
  obs.time_s = t;
  obs.movement_count = g.movements.size();
  for (const auto& m : g.movements) {
    if (!m.left_like()) continue;
    LeftObservation lo;
    lo.movement = m.id;
    lo.opposing_through = opposing_[static_cast<std::size_t>(m.id)];
    std::vector<double> speeds;
    for (auto foe : lo.opposing_through) {
      const auto* cp = m.conflict_with(foe);
      const double foe_offset = cp->foe_offset_m;
      for (const auto& v : vehicles) {
        if (v.movement != foe) continue;
        const double dist = foe_offset - v.path_pos(L);
        if (dist < 0.0) continue;
        lo.foes.push_back({foe, dist, v.speed_mps, v.accel_mps2, v.vmax_mps});
      }
      for (const auto& s : samples_[static_cast<std::size_t>(foe)])
        if (s.time_s > t - window_s_ && s.time_s <= t) speeds.push_back(s.speed_mps);
    }
    if (!speeds.empty()) lo.speed_85th_mps = nearest_rank_percentile(std::move(speeds), 85.0);
    for (auto lane_id : g.lanes_of(sim::opposing(m.approach))) {
      for (auto mid : g.lanes[static_cast<std::size_t>(lane_id)].movements) {
        if (g.movements[static_cast<std::size_t>(mid)].kind == sim::TurnKind::through && demand.rate_at(mid, t) > 0.0) {
          ++lo.opposing_through_lanes;
          break;
        }
      }
    }
    if (current) {
      switch (current->indications[static_cast<std::size_t>(m.id)]) {
        case sim::Indication::protected_green: lo.mode = LeftMode::protected_mode; break;
        case sim::Indication::permitted_green: lo.mode = LeftMode::permitted; break;
        default: lo.mode = LeftMode::prohibited; break;
      }
    }
    obs.lefts.push_back(std::move(lo));
  }
  return obs;
}

}  // namespace safelight::safety
