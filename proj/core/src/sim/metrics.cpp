#include "safelight/sim/metrics.hpp"

#include <algorithm>

#include "safelight/common/error.hpp"

namespace safelight::sim {

EpisodeReport snapshot_metrics(const MetricsLedger& ledger, double horizon_s) {
  if (!(horizon_s > 0.0)) throw ConfigError("horizon_s", "must be positive");
  EpisodeReport r;
  r.avg_waiting_s = ledger.cumulative_waiting_s / static_cast<double>(std::max<std::uint64_t>(1, ledger.entered));
  r.throughput = static_cast<double>(ledger.throughput);
  r.collisions = static_cast<double>(ledger.collisions);
  r.mean_stopped = ledger.ticks > 0 ? ledger.stopped_sum / static_cast<double>(ledger.ticks) : 0.0;
  return r;
}

}  // namespace safelight::sim
