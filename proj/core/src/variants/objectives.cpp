#include "safelight/variants/objectives.hpp"

#include <vector>

#include "safelight/agents/dqn.hpp"
#include "safelight/common/error.hpp"
#include "safelight/nn/losses.hpp"

namespace safelight::variants {

double safety_kl(const safety::SafetyVerdict& verdict, std::span<const double> advantages, int action) {
  if (verdict.unsafe.empty() || !verdict.unsafe.at(static_cast<std::size_t>(action))) return 0.0;
  const auto target = safety::desired_distribution(verdict, advantages, action);
  return nn::kl_divergence(target, nn::softmax(advantages)).value;
}

double shaped_reward(double r, const safety::SafetyVerdict& verdict, std::span<const double> advantages, int action,
                     double lambda) {
  if (lambda == 0.0) return r;
  return r - lambda * safety_kl(verdict, advantages, action);
}

double syn_r_reward(double r_mobility, double r_safety, double w1, double w2) { return w1 * r_mobility + w2 * r_safety; }

double safety_reward(std::size_t collisions, double penalty) { return -static_cast<double>(collisions) * penalty; }

int syn_q_select(std::span<const double> q_mobility, std::span<const double> q_safety, double u1, double u2) {
  if (q_mobility.size() != q_safety.size()) throw DimensionError("syn-q heads", q_mobility.size(), q_safety.size());
  std::vector<double> combined(q_mobility.size());
  for (std::size_t i = 0; i < combined.size(); ++i) combined[i] = u1 * q_mobility[i] + u2 * q_safety[i];
  return agents::argmax(combined);
}

safety::CorrectedAction act_filter(int action, const safety::SafetyVerdict& verdict, const signal::PhaseTable& table,
                                   const signal::ActionSpace& space) {
  return safety::correct_action(action, verdict, table, space);
}

}  // namespace safelight::variants
