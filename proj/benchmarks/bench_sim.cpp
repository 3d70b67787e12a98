#include <benchmark/benchmark.h>

#include "safelight/harness/scenario.hpp"
#include "safelight/signal/program.hpp"
#include "safelight/sim/collision.hpp"
#include "safelight/sim/encoders.hpp"
#include "safelight/sim/simulator.hpp"

using namespace safelight;

namespace {

const harness::Scenario& scenario() {
  static const auto sc = harness::load_scenario(SAFELIGHT_SCENARIO_DIR "/synthetic-4x12.json");
  return sc;
}

// Simulator advanced 10 minutes under the fixed-time plan, so queues exist.
sim::Simulator warmed(signal::SignalController& ctl) {
  const auto& sc = scenario();
  sim::Simulator s(sc.geometry, sc.demand, sc.sim, 7);
  const auto n = sc.geometry->movements.size();
  while (s.state().time_s < 600.0) {
    s.step(ctl.view(n));
    ctl.advance(s.config().dt_s);
  }
  return s;
}

void BM_SimulatorStep(benchmark::State& state) {
  const auto& sc = scenario();
  auto ctl = signal::SignalController::fixed_time(sc.table);
  auto s = warmed(ctl);
  const auto n = sc.geometry->movements.size();
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.step(ctl.view(n)));
    ctl.advance(s.config().dt_s);
  }
}
BENCHMARK(BM_SimulatorStep);

void BM_DetectCollisions(benchmark::State& state) {
  const auto& sc = scenario();
  auto ctl = signal::SignalController::fixed_time(sc.table);
  auto s = warmed(ctl);
  const auto& v = s.state().vehicles;
  for (auto _ : state)
    benchmark::DoNotOptimize(sim::detect_collisions(*sc.geometry, v, 600.0, s.config().dt_s, 0.0));
  state.counters["vehicles"] = static_cast<double>(v.size());
}
BENCHMARK(BM_DetectCollisions);

void BM_EncodeGrid(benchmark::State& state) {
  const auto& sc = scenario();
  auto ctl = signal::SignalController::fixed_time(sc.table);
  auto s = warmed(ctl);
  for (auto _ : state) benchmark::DoNotOptimize(sim::encode_state_grid(*sc.geometry, s.state().vehicles));
}
BENCHMARK(BM_EncodeGrid);

}  // namespace
