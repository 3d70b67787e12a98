#include "safelight/sim/encoders.hpp"

#include <algorithm>
#include <cmath>

namespace safelight::sim {

std::size_t grid_length(const IntersectionGeometry& g) { return 2 * g.lanes.size() * g.cells_per_lane(); }

std::vector<double> encode_state_grid(const IntersectionGeometry& g, std::span<const Vehicle> vehicles) {
  const std::size_t cells = g.cells_per_lane();
  std::vector<double> out(2 * g.lanes.size() * cells, 0.0);
  std::vector<double> best_pos(g.lanes.size() * cells, -1.0);
  for (const auto& v : vehicles) {
    if (v.pos_m > g.approach_length_m || v.pos_m < 0.0) continue;
    const auto k = std::min(cells - 1, static_cast<std::size_t>(std::floor(v.pos_m / g.cell_size_m)));
    const std::size_t cell = static_cast<std::size_t>(v.lane) * cells + k;
    if (v.pos_m <= best_pos[cell]) continue;
    best_pos[cell] = v.pos_m;
    out[2 * cell] = 1.0;
    out[2 * cell + 1] = v.vmax_mps > 0.0 ? std::clamp(v.speed_mps / v.vmax_mps, 0.0, 1.0) : 0.0;
  }
  return out;
}

std::size_t lane_feature_length(const IntersectionGeometry& g) { return 2 * g.lanes.size(); }

std::vector<double> encode_state_lane(const IntersectionGeometry& g, std::span<const Vehicle> vehicles,
                                      double stop_speed_mps) {
  std::vector<double> count(g.lanes.size(), 0.0);
  std::vector<double> wait(g.lanes.size(), 0.0);
  for (const auto& v : vehicles) {
    if (v.pos_m > g.approach_length_m || v.speed_mps >= stop_speed_mps) continue;
    const auto lane = static_cast<std::size_t>(v.lane);
    count[lane] += 1.0;
    wait[lane] = std::max(wait[lane], v.waiting_s);
  }
  std::vector<double> out(2 * g.lanes.size());
  for (std::size_t l = 0; l < g.lanes.size(); ++l) {
    out[2 * l] = count[l] / kQueueScale;
    out[2 * l + 1] = wait[l] / kWaitScale;
  }
  return out;
}

}  // namespace safelight::sim
