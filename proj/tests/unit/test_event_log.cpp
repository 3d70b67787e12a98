#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "safelight/sim/event_log.hpp"
#include "safelight/sim/simulator.hpp"
#include "safelight/signal/program.hpp"
#include "test_util.hpp"

using namespace safelight;
using namespace safelight::sim;

namespace {

std::vector<nlohmann::json> logged_run(std::uint64_t seed, std::uint64_t* collisions) {
  const auto sc = testutil::synthetic();
  EventLog log(true);
  Simulator s(sc.geometry, sc.demand, sc.sim, seed);
  s.set_event_log(&log);
  auto ctl = signal::SignalController::fixed_time(sc.table);
  for (int t = 0; t < 1800; ++t) {
    s.step(ctl.view(sc.geometry->movements.size()));
    ctl.advance(1.0);
  }
  s.finish();
  *collisions = s.state().ledger.collisions;
  std::stringstream io;
  log.write(io);
  return EventLog::read(io);
}

}  // namespace

TEST(EventLog, ReplayReproducesLoggedCollisions) {
  std::uint64_t collisions = 0;
  const auto records = logged_run(3, &collisions);
  ASSERT_GT(collisions, 0u);
  const auto rep = replay_collisions(*testutil::synthetic().geometry, records, 0.5);
  EXPECT_TRUE(rep.consistent()) << (rep.mismatches.empty() ? "" : rep.mismatches.front());
  EXPECT_EQ(rep.logged, collisions);
  EXPECT_EQ(rep.ticks, 1800u);
  EXPECT_EQ(records.back().at("type"), "end");
}

TEST(EventLog, ReplayFlagsTamperedLog) {
  std::uint64_t collisions = 0;
  auto records = logged_run(3, &collisions);
  auto it = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.at("type") == "collision"; });
  ASSERT_NE(it, records.end());
  records.erase(it);
  EXPECT_FALSE(replay_collisions(*testutil::synthetic().geometry, records, 0.5).consistent());
}

TEST(EventLog, SpawnsAndExitsBalance) {
  std::uint64_t collisions = 0;
  const auto records = logged_run(5, &collisions);
  std::size_t spawns = 0, exits = 0, present = 0;
  for (const auto& r : records) {
    if (r.at("type") == "spawn") ++spawns;
    if (r.at("type") == "exit") ++exits;
    if (r.at("type") == "end") present = r.at("present").size();
  }
  EXPECT_EQ(spawns, exits + present + 2 * collisions);
}
