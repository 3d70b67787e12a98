#pragma once

#include <cstdint>
#include <vector>

namespace safelight::sim {

struct MetricsLedger {
  double cumulative_waiting_s = 0.0;
  std::uint64_t entered = 0;
  std::uint64_t throughput = 0;
  std::uint64_t collisions = 0;
  std::uint64_t change_interval_collisions = 0;  // at least one party entered on yellow/all-red
  std::uint64_t blocked_spawns = 0;
  std::uint64_t stopped_now = 0;
  double stopped_sum = 0.0;
  std::uint64_t ticks = 0;
  std::vector<int> lane_queue;
  std::vector<double> lane_max_wait;
};

struct EpisodeReport {
  double avg_waiting_s = 0.0;
  double throughput = 0.0;
  double mean_stopped = 0.0;
  double collisions = 0.0;
  double intervention_rate = 0.0;
  int episode = 0;
  std::uint64_t seed = 0;
};

// horizon_s is the nominal episode length; the stopped-vehicle mean is taken
// over the ticks actually simulated.
EpisodeReport snapshot_metrics(const MetricsLedger& ledger, double horizon_s);

}  // namespace safelight::sim
