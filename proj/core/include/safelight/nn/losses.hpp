#pragma once

#include <span>
#include <vector>

namespace safelight::nn {

// Elementwise floor applied to both arguments of every KL evaluation.
inline constexpr double kKlFloor = 1e-6;

std::vector<double> softmax(std::span<const double> logits);

// Clamp entries to >= floor and renormalize to unit mass.
std::vector<double> floor_distribution(std::span<const double> p, double floor = kKlFloor);

struct KlResult {
  double value = 0.0;
  std::vector<double> grad_q;  // d value / d q (raw, pre-flooring q)
};

enum class Flooring { apply, none };

// KL(p || q) = sum_i p_i ln(p_i / q_i). Both inputs must sum to 1 within 1e-9.
// With Flooring::apply both are floored first; with Flooring::none a zero q
// entry is an error.
KlResult kl_divergence(std::span<const double> p, std::span<const double> q,
                       Flooring flooring = Flooring::apply, double floor = kKlFloor);

// Gradient of KL(target || softmax(logits)) w.r.t. the logits, target held
// constant: softmax(logits) - target.
std::vector<double> kl_logits_gradient(std::span<const double> target, std::span<const double> logits);

}  // namespace safelight::nn
