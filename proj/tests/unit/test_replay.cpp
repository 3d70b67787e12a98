#include <gtest/gtest.h>

#include <cmath>

#include "safelight/agents/replay.hpp"

using namespace safelight;
using namespace safelight::agents;

namespace {

// Regularized upper incomplete gamma Q(a, x), series / continued fraction.
double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1.0 / 1e-300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

Transition dummy(int i) {
  Transition t;
  t.state = {static_cast<double>(i)};
  t.next_state = {0.0};
  return t;
}

}  // namespace

TEST(Chi2Helper, KnownValues) {
  // Survival of chi-square with k dof at x is Q(k/2, x/2).
  EXPECT_NEAR(gamma_q(1.0, 1.0), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(gamma_q(4.5, 21.666 / 2), 0.01, 2e-4);  // chi2(9) critical value at 0.01
}

TEST(SumTree, PrefixSearch) {
  SumTree t(5);
  const std::vector<double> v{1.0, 0.0, 2.0, 3.0, 4.0};
  for (std::size_t i = 0; i < v.size(); ++i) t.set(i, v[i]);
  EXPECT_DOUBLE_EQ(t.total(), 10.0);
  EXPECT_EQ(t.find(0.0), 0u);
  EXPECT_EQ(t.find(0.999), 0u);
  EXPECT_EQ(t.find(1.0), 2u);  // skips the empty leaf
  EXPECT_EQ(t.find(2.999), 2u);
  EXPECT_EQ(t.find(3.0), 3u);
  EXPECT_EQ(t.find(9.99), 4u);
}

TEST(PrioritizedReplay, SamplingFrequenciesPassChiSquare) {
  PrioritizedReplayBuffer buf(16, 0.6, 1e-3);
  const std::size_t n = 10;
  for (std::size_t i = 0; i < n; ++i) buf.push(dummy(static_cast<int>(i)));
  std::vector<std::size_t> idx(n);
  std::vector<double> td(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = i;
    td[i] = 0.1 + 0.35 * static_cast<double>(i);
  }
  buf.update_priorities(idx, td);

  std::vector<double> expected(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) z += std::pow(std::abs(td[i]) + 1e-3, 0.6);
  for (std::size_t i = 0; i < n; ++i) {
    expected[i] = std::pow(std::abs(td[i]) + 1e-3, 0.6) / z;
    EXPECT_NEAR(buf.probability(i), expected[i], 1e-12);
  }

  Rng rng(12345);
  std::vector<double> counts(n, 0.0);
  const std::size_t draws = 200000;
  for (std::size_t k = 0; k < draws / 100; ++k)
    for (auto i : buf.sample(100, 0.4, rng).indices) counts[i] += 1.0;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = expected[i] * static_cast<double>(draws);
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  const double p = gamma_q((n - 1) / 2.0, chi2 / 2.0);
  RecordProperty("chi2_p_value", std::to_string(p));
  EXPECT_GT(p, 0.01) << "chi2 = " << chi2;
}

TEST(PrioritizedReplay, ImportanceWeights) {
  PrioritizedReplayBuffer buf(8, 1.0, 0.0);
  for (int i = 0; i < 4; ++i) buf.push(dummy(i));
  buf.update_priorities({0, 1, 2, 3}, {1.0, 2.0, 3.0, 4.0});
  Rng rng(1);
  const auto s = buf.sample(64, 0.5, rng);
  double max_w = 0.0;
  for (auto i : s.indices) max_w = std::max(max_w, std::pow(4.0 * (static_cast<double>(i) + 1) / 10.0, -0.5));
  for (std::size_t k = 0; k < s.indices.size(); ++k) {
    const double p = (static_cast<double>(s.indices[k]) + 1) / 10.0;
    EXPECT_NEAR(s.probabilities[k], p, 1e-12);
    EXPECT_NEAR(s.weights[k], std::pow(4.0 * p, -0.5) / max_w, 1e-12);
  }
}

TEST(PrioritizedReplay, NewTransitionsGetMaxPriorityAndRingOverwrites) {
  PrioritizedReplayBuffer buf(3, 1.0, 0.0);
  buf.push(dummy(0));
  buf.update_priorities({0}, {5.0});
  buf.push(dummy(1));
  EXPECT_EQ(buf.at(1).priority, 5.0);
  buf.push(dummy(2));
  buf.push(dummy(3));  // overwrites slot 0
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.at(0).state[0], 3.0);
}

TEST(PrioritizedReplay, EmptyBufferThrows) {
  PrioritizedReplayBuffer buf(4, 0.6, 1e-3);
  Rng rng(1);
  EXPECT_ANY_THROW(buf.sample(1, 0.4, rng));
}
