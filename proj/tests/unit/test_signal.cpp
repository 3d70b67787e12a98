#include <gtest/gtest.h>

#include "safelight/common/error.hpp"
#include "safelight/signal/program.hpp"
#include "test_util.hpp"

using namespace safelight;
using namespace safelight::signal;

TEST(ActionSpace, CyclicLayout) {
  ActionSpace s(ActionMode::cyclic, 4);
  EXPECT_EQ(s.size(), 9);
  EXPECT_EQ(s.decode(0).delta_sign, 0);
  EXPECT_EQ(s.decode(1), (Action{ActionMode::cyclic, 0, -1}));
  EXPECT_EQ(s.decode(2), (Action{ActionMode::cyclic, 0, +1}));
  EXPECT_EQ(s.decode(8), (Action{ActionMode::cyclic, 3, +1}));
  for (int i = 0; i < s.size(); ++i) EXPECT_EQ(s.encode(s.decode(i)), i);
  EXPECT_ANY_THROW(s.decode(9));
}

TEST(ActionSpace, AcyclicLayout) {
  ActionSpace s(ActionMode::acyclic, 8);
  EXPECT_EQ(s.size(), 8);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(s.decode(i).phase, i);
  EXPECT_THROW(action_mode_from_string("sometimes"), ConfigError);
}

TEST(CyclicPlan, InitialPlanAndClamping) {
  const auto sc = testutil::synthetic();
  auto plan = CyclicPlan::from_table(sc.table);
  EXPECT_EQ(plan.durations_s, (std::vector<double>{30, 15, 30, 15}));
  EXPECT_DOUBLE_EQ(plan.cycle_length(), 90.0 + 4 * 5.0);
  plan = apply_cyclic_action(plan, {ActionMode::cyclic, 1, -1}, 5.0);
  EXPECT_EQ(plan.durations_s[1], 10.0);
  plan = apply_cyclic_action(plan, {ActionMode::cyclic, 1, -1}, 5.0);
  EXPECT_EQ(plan.durations_s[1], 10.0);  // clamped at min
  for (int k = 0; k < 20; ++k) plan = apply_cyclic_action(plan, {ActionMode::cyclic, 0, +1}, 5.0);
  EXPECT_EQ(plan.durations_s[0], 60.0);
  const auto same = apply_cyclic_action(plan, {ActionMode::cyclic, 2, 0}, 5.0);
  EXPECT_EQ(same.durations_s, plan.durations_s);
}

TEST(CyclicPlan, DurationsStayInBoundsUnderRandomActions) {
  const auto sc = testutil::synthetic();
  auto plan = CyclicPlan::from_table(sc.table);
  ActionSpace s(ActionMode::cyclic, 4);
  Rng rng(3);
  for (int k = 0; k < 2000; ++k) {
    plan = apply_cyclic_action(plan, s.decode(static_cast<int>(rng.below(9))), 5.0);
    for (std::size_t i = 0; i < 4; ++i) {
      ASSERT_GE(plan.durations_s[i], plan.min_s[i]);
      ASSERT_LE(plan.durations_s[i], plan.max_s[i]);
    }
  }
}

TEST(Schedule, CycleHasGreenYellowAllRedPerPhase) {
  const auto sc = testutil::synthetic();
  const auto sched = cycle_schedule(CyclicPlan::from_table(sc.table));
  ASSERT_EQ(sched.size(), 12u);
  EXPECT_EQ(sched[0], (ScheduledInterval{0, Interval::green, 30.0}));
  EXPECT_EQ(sched[1], (ScheduledInterval{0, Interval::yellow, 3.0}));
  EXPECT_EQ(sched[2], (ScheduledInterval{0, Interval::all_red, 2.0}));
  EXPECT_EQ(sched[3].phase, 1);
}

TEST(Schedule, AcyclicTransitions) {
  const auto sc = testutil::synthetic();
  SignalState s{2, Interval::green, 12.0};
  auto keep = apply_acyclic_action(s, sc.table, 2, 10.0);
  ASSERT_EQ(keep.size(), 1u);
  EXPECT_EQ(keep[0], (ScheduledInterval{2, Interval::green, 10.0}));
  auto change = apply_acyclic_action(s, sc.table, 5, 10.0);
  ASSERT_EQ(change.size(), 3u);
  EXPECT_EQ(change[0], (ScheduledInterval{2, Interval::yellow, 3.0}));
  EXPECT_EQ(change[1], (ScheduledInterval{2, Interval::all_red, 2.0}));
  EXPECT_EQ(change[2], (ScheduledInterval{5, Interval::green, 10.0}));
  EXPECT_THROW(apply_acyclic_action(s, sc.table, 12, 10.0), ConfigError);
}

TEST(Indication, PermittedAndOverride) {
  const auto sc = testutil::synthetic();
  const auto& g = *sc.geometry;
  SignalState s{0, Interval::green, 0.0};
  const auto ebl = g.require("EBL"), ebt = g.require("EBT"), nbt = g.require("NBT");
  EXPECT_EQ(indication_for(s, sc.table, ebt), Indication::protected_green);
  EXPECT_EQ(indication_for(s, sc.table, ebl), Indication::permitted_green);
  EXPECT_EQ(indication_for(s, sc.table, ebl, true), Indication::red);
  EXPECT_EQ(indication_for(s, sc.table, ebt, true), Indication::protected_green);  // override only touches permitted
  EXPECT_EQ(indication_for(s, sc.table, nbt), Indication::red);
  s.interval = Interval::yellow;
  EXPECT_EQ(indication_for(s, sc.table, ebl), Indication::yellow);
  s.interval = Interval::all_red;
  EXPECT_EQ(indication_for(s, sc.table, ebt), Indication::red);
}

TEST(Indication, NoConflictingGreensInAnyPhase) {
  const auto sc = testutil::synthetic();
  const auto& g = *sc.geometry;
  for (const auto& p : sc.table.phases) {
    SignalState s{p.id, Interval::green, 0.0};
    const auto v = signal_view(s, sc.table, g.movements.size());
    for (std::size_t a = 0; a < g.movements.size(); ++a)
      for (std::size_t b = a + 1; b < g.movements.size(); ++b)
        if (v.indications[a] == Indication::protected_green && v.indications[b] == Indication::protected_green)
          EXPECT_FALSE(g.conflicts(static_cast<int>(a), static_cast<int>(b))) << p.name;
  }
}

TEST(Controller, CyclicAsksOncePerCycle) {
  const auto sc = testutil::synthetic();
  SignalController c(sc.table, ActionMode::cyclic);
  EXPECT_TRUE(c.needs_decision());
  c.apply(0);
  EXPECT_FALSE(c.needs_decision());
  int ticks = 0;
  while (!c.needs_decision()) {
    c.advance(1.0);
    ++ticks;
  }
  EXPECT_EQ(ticks, 110);
  c.apply(2);  // phase 0 +5 s
  EXPECT_DOUBLE_EQ(c.scheduled_remaining_s(), 115.0);
  EXPECT_EQ(c.context_features()[0], 35.0 / 60.0);
}

TEST(Controller, AcyclicWindowIncludesChangeInterval) {
  const auto sc = testutil::synthetic();
  SignalController c(sc.table, ActionMode::acyclic);
  c.apply(0);
  EXPECT_DOUBLE_EQ(c.scheduled_remaining_s(), 10.0);
  for (int i = 0; i < 10; ++i) c.advance(1.0);
  ASSERT_TRUE(c.needs_decision());
  c.apply(3);
  EXPECT_DOUBLE_EQ(c.scheduled_remaining_s(), 15.0);
  EXPECT_EQ(c.state().interval, Interval::yellow);
  EXPECT_EQ(c.state().active_phase, 0);
  const auto ctx = c.context_features();
  EXPECT_EQ(ctx.size(), 8u);
  EXPECT_EQ(ctx[0], 1.0);
}

TEST(Controller, FixedTimeNeverAsksAndRepeats) {
  const auto sc = testutil::synthetic();
  auto c = SignalController::fixed_time(sc.table);
  std::vector<int> phase_at;
  for (int t = 0; t < 330; ++t) {
    EXPECT_FALSE(c.needs_decision());
    phase_at.push_back(c.state().active_phase);
    c.advance(1.0);
  }
  for (int t = 0; t < 220; ++t) EXPECT_EQ(phase_at[t], phase_at[t + 110]);
}

TEST(PhaseTable, RejectsConflictingProtectedMovements) {
  auto sc = testutil::synthetic();
  const auto& g = *sc.geometry;
  sc.table.phases[0].protected_green.push_back(g.require("NBT"));
  EXPECT_THROW(sc.table.validate(g), ConfigError);
  auto t2 = testutil::synthetic().table;
  t2.phases[1].initial_duration_s = 99.0;
  EXPECT_THROW(t2.validate(g), ConfigError);
}

TEST(PhaseTable, JsonRoundTrip) {
  const auto sc = testutil::synthetic();
  const auto back = phase_table_from_json(to_json(sc.table, *sc.geometry), *sc.geometry);
  ASSERT_EQ(back.phases.size(), 8u);
  EXPECT_EQ(back.cyclic_order, sc.table.cyclic_order);
  EXPECT_EQ(back.phases[0].permitted, sc.table.phases[0].permitted);
}
