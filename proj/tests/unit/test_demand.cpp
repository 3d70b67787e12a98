#include <gtest/gtest.h>

#include "safelight/common/error.hpp"
#include "safelight/sim/demand.hpp"
#include "test_util.hpp"

using namespace safelight;
using namespace safelight::sim;

TEST(Demand, PiecewiseConstantRate) {
  const auto sc = testutil::synthetic();
  const auto ebt = sc.geometry->require("EBT");
  EXPECT_EQ(sc.demand.rate_at(ebt, 0.0), 420.0);
  EXPECT_EQ(sc.demand.rate_at(ebt, 1199.9), 420.0);
  EXPECT_EQ(sc.demand.rate_at(ebt, 1200.0), 546.0);
  EXPECT_EQ(sc.demand.rate_at(ebt, 3599.0), 420.0);
}

TEST(Demand, ScaleAndUnlistedMovements) {
  const auto g = *testutil::synthetic().geometry;
  nlohmann::json j{{"rates", {{"EBT", 100.0}}}, {"scale", 2.0}};
  const auto d = demand_from_json(j, g);
  EXPECT_EQ(d.rate_at(g.require("EBT"), 50.0), 200.0);
  EXPECT_EQ(d.rate_at(g.require("WBT"), 50.0), 0.0);
}

TEST(Demand, Validation) {
  const auto g = *testutil::synthetic().geometry;
  EXPECT_THROW(demand_from_json({{"rates", {{"NOPE", 1.0}}}}, g), ConfigError);
  EXPECT_THROW(demand_from_json({{"rates", {{"EBT", -5.0}}}}, g), ConfigError);
  EXPECT_THROW(demand_from_json({{"rates", {{"EBT", 1.0}}}, {"ignore_foe_prob", 1.5}}, g), ConfigError);
  EXPECT_THROW(demand_from_json({{"rates", {{"EBT", {{10.0, 1.0}, {5.0, 2.0}}}}}}, g), ConfigError);
}

TEST(Demand, JsonRoundTrip) {
  const auto sc = testutil::synthetic();
  const auto back = demand_from_json(to_json(sc.demand, *sc.geometry), *sc.geometry);
  EXPECT_EQ(back.ignore_foe_prob, sc.demand.ignore_foe_prob);
  for (std::size_t m = 0; m < sc.geometry->movements.size(); ++m)
    for (double t : {0.0, 1500.0, 3000.0})
      EXPECT_EQ(back.rate_at(static_cast<MovementId>(m), t), sc.demand.rate_at(static_cast<MovementId>(m), t));
}
