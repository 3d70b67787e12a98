#pragma once

#include <span>

#include "safelight/safety/safety_model.hpp"

namespace safelight::variants {

// KL(Â || softmax(A)) for the executed action; 0 when that action is safe.
double safety_kl(const safety::SafetyVerdict& verdict, std::span<const double> advantages, int action);

// r - lambda * KL(Â || softmax(A)). A pure penalty: equals r for safe actions.
double shaped_reward(double r, const safety::SafetyVerdict& verdict, std::span<const double> advantages, int action,
                     double lambda);

double syn_r_reward(double r_mobility, double r_safety, double w1, double w2);

// -(collisions since the last action) * penalty
double safety_reward(std::size_t collisions, double penalty);

// argmax_a u1 Qm(s,a) + u2 Qs(s,a), lowest index on ties.
int syn_q_select(std::span<const double> q_mobility, std::span<const double> q_safety, double u1, double u2);

safety::CorrectedAction act_filter(int action, const safety::SafetyVerdict& verdict, const signal::PhaseTable& table,
                                   const signal::ActionSpace& space);

}  // namespace safelight::variants
