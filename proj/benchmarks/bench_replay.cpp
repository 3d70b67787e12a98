#include <benchmark/benchmark.h>

#include "safelight/agents/replay.hpp"
#include "safelight/common/rng.hpp"

using namespace safelight;

namespace {

agents::PrioritizedReplayBuffer filled(std::size_t n, Rng& rng) {
  agents::PrioritizedReplayBuffer buf(n, 0.6, 1e-6);
  std::vector<std::size_t> idx;
  std::vector<double> td;
  for (std::size_t i = 0; i < n; ++i) {
    agents::Transition t;
    t.state.assign(16, 0.0);
    t.next_state.assign(16, 0.0);
    buf.push(std::move(t));
    idx.push_back(i);
    td.push_back(rng.uniform() * 5.0);
  }
  buf.update_priorities(idx, td);
  return buf;
}

void BM_PerSample(benchmark::State& state) {
  Rng rng(3);
  auto buf = filled(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(buf.sample(64, 0.4, rng));
}
BENCHMARK(BM_PerSample)->Arg(1 << 12)->Arg(1 << 16);

void BM_PerUpdate(benchmark::State& state) {
  Rng rng(4);
  auto buf = filled(1 << 16, rng);
  std::vector<std::size_t> idx(64);
  std::vector<double> td(64);
  for (auto _ : state) {
    for (std::size_t i = 0; i < 64; ++i) {
      idx[i] = rng.below(1 << 16);
      td[i] = rng.uniform();
    }
    buf.update_priorities(idx, td);
  }
}
BENCHMARK(BM_PerUpdate);

}  // namespace
