#include <benchmark/benchmark.h>

#include "safelight/common/rng.hpp"
#include "safelight/nn/mlp.hpp"

using namespace safelight;

namespace {

nn::Mlp grid_net(Rng& rng) {
  return nn::Mlp({480, 128, 64, 8}, nn::Activation::relu, nn::Activation::identity, rng);
}

nn::Matrix random_inputs(std::size_t rows, std::size_t cols, Rng& rng) {
  nn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return m;
}

void BM_MlpForwardBatch(benchmark::State& state) {
  Rng rng(1);
  auto net = grid_net(rng);
  const auto x = random_inputs(static_cast<std::size_t>(state.range(0)), 480, rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForwardBatch)->Arg(1)->Arg(64);

void BM_MlpBackward(benchmark::State& state) {
  Rng rng(2);
  auto net = grid_net(rng);
  const auto x = random_inputs(64, 480, rng);
  const nn::Matrix up = nn::Matrix::Ones(64, 8);
  for (auto _ : state) {
    auto cache = net.forward_cached(x);
    benchmark::DoNotOptimize(net.backward(cache, up, nullptr));
  }
}
BENCHMARK(BM_MlpBackward);

}  // namespace
