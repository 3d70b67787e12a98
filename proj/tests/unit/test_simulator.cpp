#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "safelight/common/error.hpp"
#include "safelight/sim/encoders.hpp"
#include "safelight/sim/kinematics.hpp"
#include "safelight/sim/simulator.hpp"
#include "sim_helpers.hpp"
#include "test_util.hpp"

using namespace safelight;
using namespace safelight::sim;
using safelight::testutil::run_fixed_time;
using safelight::testutil::synthetic;

namespace {

SignalView only(const IntersectionGeometry& g, std::initializer_list<std::pair<const char*, Indication>> shown) {
  auto v = SignalView::all(g.movements.size(), Indication::red);
  for (auto [name, ind] : shown) v.indications[static_cast<std::size_t>(g.require(name))] = ind;
  return v;
}

}  // namespace

TEST(Kinematics, SafeVelocityStopsWithinGap) {
  // From the safe velocity the follower can stop within gap + the leader's braking distance.
  for (double gap : {0.0, 5.0, 20.0, 80.0}) {
    for (double vl : {0.0, 5.0, 15.0}) {
      const double v = safe_velocity(gap, vl, 4.5, 1.0);
      EXPECT_LE(v * 1.0 + braking_distance(v, 4.5), gap + braking_distance(vl, 4.5) + 1e-9);
    }
  }
}

TEST(Kinematics, TimeToCoverHandComputed) {
  // 0 -> 10 m/s at 2 m/s^2 takes 5 s and 25 m; the remaining 25 m take 2.5 s.
  EXPECT_DOUBLE_EQ(time_to_cover(50.0, 0.0, 2.0, 10.0), 7.5);
  EXPECT_DOUBLE_EQ(time_to_cover(9.0, 0.0, 2.0, 10.0), 3.0);
  EXPECT_DOUBLE_EQ(time_at_constant_speed(30.0, 10.0), 3.0);
  EXPECT_TRUE(std::isinf(time_at_constant_speed(30.0, 0.0)));
}

TEST(Simulator, ZeroCollisionsWithoutFoeIgnoring20Seeds) {
  const auto sc = synthetic();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::uint64_t collisions = 0, throughput = 0;
    run_fixed_time(sc, 0.0, seed, 3600.0, [&](const Simulator& s, const StepResult&) {
      collisions = s.state().ledger.collisions;
      throughput = s.state().ledger.throughput;
    });
    EXPECT_EQ(collisions, 0u) << "seed " << seed;
    EXPECT_GT(throughput, 1000u);
  }
}

TEST(Simulator, ProtectedOnlyControlIsCollisionFree) {
  auto sc = synthetic();
  // Protected-only cycle: each approach in turn.
  sc.table.cyclic_order = {4, 5, 6, 7};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::uint64_t collisions = 0;
    run_fixed_time(sc, 0.0, seed, 3600.0,
                   [&](const Simulator& s, const StepResult&) { collisions = s.state().ledger.collisions; });
    EXPECT_EQ(collisions, 0u) << "seed " << seed;
  }
}

TEST(Simulator, FoeIgnoringProducesCollisions) {
  const auto sc = synthetic();
  std::uint64_t collisions = 0;
  run_fixed_time(sc, 0.2, 1, 3600.0,
                 [&](const Simulator& s, const StepResult&) { collisions = s.state().ledger.collisions; });
  EXPECT_GT(collisions, 0u);
}

TEST(Simulator, VehicleConservationEveryTick) {
  const auto sc = synthetic();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    run_fixed_time(sc, 0.3, seed, 3600.0, [&](const Simulator& s, const StepResult&) {
      const auto& st = s.state();
      ASSERT_EQ(st.spawned, st.vehicles.size() + st.exited + st.collided);
      ASSERT_EQ(st.collided, 2 * st.ledger.collisions);
      ASSERT_EQ(st.exited, st.ledger.throughput);
    });
  }
}

TEST(Simulator, DeterministicPerSeed) {
  const auto sc = synthetic();
  std::vector<std::tuple<std::uint64_t, double, double>> a, b;
  auto record = [](auto& out) {
    return [&out](const Simulator& s, const StepResult&) {
      for (const auto& v : s.state().vehicles) out.emplace_back(v.id, v.pos_m, v.speed_mps);
    };
  };
  run_fixed_time(sc, 0.2, 9, 1200.0, record(a));
  run_fixed_time(sc, 0.2, 9, 1200.0, record(b));
  ASSERT_EQ(a.size(), b.size());
  EXPECT_TRUE(a == b);
  std::vector<std::tuple<std::uint64_t, double, double>> c;
  run_fixed_time(sc, 0.2, 10, 1200.0, record(c));
  EXPECT_FALSE(a == c);
}

TEST(Simulator, NoRearEndOverlapWithinLanes) {
  const auto sc = synthetic();
  const double L = sc.geometry->approach_length_m;
  run_fixed_time(sc, 0.2, 4, 3600.0, [&](const Simulator& s, const StepResult&) {
    std::map<int, std::vector<const Vehicle*>> lanes;
    for (const auto& v : s.state().vehicles)
      if (v.pos_m <= L) lanes[v.lane].push_back(&v);
    for (auto& [lane, vs] : lanes) {
      std::sort(vs.begin(), vs.end(), [](auto* x, auto* y) { return x->pos_m > y->pos_m; });
      for (std::size_t i = 1; i < vs.size(); ++i)
        ASSERT_GE(vs[i - 1]->pos_m - vs[i - 1]->length_m - vs[i]->pos_m, -1e-9) << "lane " << lane;
    }
  });
}

TEST(Simulator, RedStopsAtTheLine) {
  const auto sc = synthetic();
  Simulator s(sc.geometry, DemandProfile::uniform(sc.geometry->movements.size(), 0.0), sc.sim, 1);
  const auto& g = *sc.geometry;
  auto v = s.make_vehicle(g.require("NBT"), 60.0, 15.0);
  s.add_vehicle(v);
  const auto red = SignalView::all(g.movements.size(), Indication::red);
  for (int i = 0; i < 30; ++i) s.step(red);
  ASSERT_EQ(s.state().vehicles.size(), 1u);
  EXPECT_LE(s.state().vehicles[0].pos_m, g.approach_length_m);
  EXPECT_LT(s.state().vehicles[0].speed_mps, s.config().stop_speed_mps);
}

TEST(Simulator, ScriptedFoeIgnoringLeftCollides) {
  const auto sc = synthetic();
  const auto& g = *sc.geometry;
  const double L = g.approach_length_m;
  Simulator s(sc.geometry, DemandProfile::uniform(g.movements.size(), 0.0), sc.sim, 1);
  auto left = s.make_vehicle(g.require("EBL"), L - 1.0, 10.0, true);
  auto through = s.make_vehicle(g.require("WBT"), L - 19.0, 22.35);
  const auto lid = s.add_vehicle(left).id;
  const auto tid = s.add_vehicle(through).id;
  const auto view = only(g, {{"EBL", Indication::permitted_green}, {"WBT", Indication::protected_green}});
  std::vector<CollisionEvent> events;
  for (int i = 0; i < 5; ++i)
    for (const auto& e : s.step(view).collisions) events.push_back(e);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].vehicle_a, std::min(lid, tid));
  EXPECT_EQ(events[0].vehicle_b, std::max(lid, tid));
  EXPECT_FALSE(events[0].during_change_interval());
}

TEST(Simulator, YieldingLeftWaitsForGap) {
  const auto sc = synthetic();
  const auto& g = *sc.geometry;
  const double L = g.approach_length_m;
  Simulator s(sc.geometry, DemandProfile::uniform(g.movements.size(), 0.0), sc.sim, 1);
  s.add_vehicle(s.make_vehicle(g.require("EBL"), L - 1.0, 0.0));
  s.add_vehicle(s.make_vehicle(g.require("WBT"), L - 60.0, 22.35));
  const auto view = only(g, {{"EBL", Indication::permitted_green}, {"WBT", Indication::protected_green}});
  const auto first = s.step(view);
  EXPECT_LE(s.state().vehicles[0].pos_m, L);  // gap rejected
  std::uint64_t collisions = first.collisions.size();
  for (int i = 0; i < 30; ++i) collisions += s.step(view).collisions.size();
  EXPECT_EQ(collisions, 0u);
  EXPECT_EQ(s.state().ledger.throughput, 2u);
}

TEST(Simulator, ThroughYieldsToVehicleInJunction) {
  const auto sc = synthetic();
  const auto& g = *sc.geometry;
  const double L = g.approach_length_m;
  Simulator s(sc.geometry, DemandProfile::uniform(g.movements.size(), 0.0), sc.sim, 1);
  auto stuck = s.make_vehicle(g.require("EBL"), L + 12.0, 0.0);
  s.add_vehicle(stuck);
  s.add_vehicle(s.make_vehicle(g.require("WBT"), L - 25.0, 10.0));
  // The left is red now but already inside; it clears on its own.
  const auto view = only(g, {{"WBT", Indication::protected_green}});
  std::uint64_t collisions = 0;
  for (int i = 0; i < 40; ++i) collisions += s.step(view).collisions.size();
  EXPECT_EQ(collisions, 0u);
  EXPECT_EQ(s.state().ledger.throughput, 2u);
}

TEST(Simulator, RejectsWrongSignalWidth) {
  const auto sc = synthetic();
  Simulator s(sc.geometry, sc.demand, sc.sim, 1);
  EXPECT_THROW(s.step(SignalView::all(3, Indication::red)), DimensionError);
}

TEST(Simulator, ConfigValidation) {
  SimConfig c;
  c.dt_s = 0.3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig{};
  c.emergency_decel_mps2 = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  const auto j = to_json(SimConfig{});
  const auto back = sim_config_from_json(j);
  EXPECT_EQ(back.gap_accept_s, 4.0);
  EXPECT_EQ(back.emergency_decel_mps2, 9.0);
}

TEST(Simulator, HalfSecondStepAlsoCollisionFreeWithoutIgnoring) {
  auto sc = synthetic();
  sc.sim.dt_s = 0.5;
  std::uint64_t collisions = 0, throughput = 0;
  run_fixed_time(sc, 0.0, 2, 3600.0, [&](const Simulator& s, const StepResult&) {
    collisions = s.state().ledger.collisions;
    throughput = s.state().ledger.throughput;
  });
  EXPECT_EQ(collisions, 0u);
  EXPECT_GT(throughput, 1000u);
}

TEST(Spawning, ArrivalRateMatchesDemand) {
  const auto sc = synthetic();
  const auto& g = *sc.geometry;
  auto d = DemandProfile::uniform(g.movements.size(), 360.0);
  Rng rng(5);
  std::uint64_t next = 1, spawned = 0;
  const std::vector<Vehicle> none;
  for (int t = 0; t < 3600; ++t) spawned += spawn_vehicles(g, d, sc.sim, none, t, 1.0, rng, next).size();
  // 12 movements, one per lane, 0.1 per second each.
  EXPECT_NEAR(static_cast<double>(spawned), 4320.0, 4.0 * std::sqrt(4320.0));
}

TEST(Spawning, BlockedEntryDropsArrival) {
  const auto sc = synthetic();
  const auto& g = *sc.geometry;
  auto d = DemandProfile::uniform(g.movements.size(), 0.0);
  d.rates[0] = {{0.0, 3600.0}};  // certain arrival on movement 0
  Simulator s(sc.geometry, d, sc.sim, 1);
  std::vector<Vehicle> present{s.make_vehicle(0, 3.0, 0.0)};
  Rng rng(1);
  std::uint64_t next = 10, blocked = 0;
  EXPECT_TRUE(spawn_vehicles(g, d, sc.sim, present, 0.0, 1.0, rng, next, &blocked).empty());
  EXPECT_EQ(blocked, 1u);
}
