#include "safelight/nn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "safelight/common/error.hpp"

namespace safelight::nn {

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw NumericError("softmax: empty input");
  for (double z : logits)
    if (!std::isfinite(z)) throw NumericError("softmax: non-finite logit");
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> floor_distribution(std::span<const double> p, double floor) {
  std::vector<double> out(p.begin(), p.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::max(v, floor);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

namespace {

void require_distribution(std::span<const double> p, const char* name) {
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw NumericError(std::string("kl_divergence: ") + name + " has invalid entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw NumericError(std::string("kl_divergence: ") + name + " is not normalized");
}

}  // namespace

KlResult kl_divergence(std::span<const double> p, std::span<const double> q, Flooring flooring, double floor) {
  if (p.size() != q.size()) throw DimensionError("kl_divergence lengths", p.size(), q.size());
  require_distribution(p, "p");
  require_distribution(q, "q");

  KlResult result;
  result.grad_q.assign(q.size(), 0.0);
  if (flooring == Flooring::none) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0.0) throw NumericError("kl_divergence: zero q entry without flooring");
      if (p[i] > 0.0) result.value += p[i] * std::log(p[i] / q[i]);
      result.grad_q[i] = -p[i] / q[i];
    }
    result.value = std::max(result.value, 0.0);
    return result;
  }

  const auto pf = floor_distribution(p, floor);
  double mass = 0.0;
  for (double v : q) mass += std::max(v, floor);
  std::vector<double> qf(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) qf[i] = std::max(q[i], floor) / mass;

  for (std::size_t i = 0; i < q.size(); ++i) result.value += pf[i] * std::log(pf[i] / qf[i]);
  // q~_i = max(q_i, floor) / sum_j max(q_j, floor); entries held at the floor
  // do not move with q_i.
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > floor) result.grad_q[i] = (1.0 - pf[i] / qf[i]) / mass;
  result.value = std::max(result.value, 0.0);
  return result;
}

std::vector<double> kl_logits_gradient(std::span<const double> target, std::span<const double> logits) {
  if (target.size() != logits.size()) throw DimensionError("kl_logits_gradient lengths", logits.size(), target.size());
  auto q = softmax(logits);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] -= target[i];
  return q;
}

}  // namespace safelight::nn
