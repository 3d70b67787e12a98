#pragma once

#include <cstddef>
#include <vector>

#include "safelight/common/rng.hpp"

namespace safelight::agents {

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
  double priority = 1.0;
  // Per-action unsafe flags at collection time; empty when no safety model ran.
  std::vector<bool> unsafe;
};

// Binary sum tree over leaf values; leaves are ring-buffer slots.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  void set(std::size_t index, double value);
  double get(std::size_t index) const { return tree_[leaf0_ + index]; }
  double total() const { return tree_[1]; }
  // Leaf whose cumulative range contains `prefix` (0 <= prefix < total()).
  std::size_t find(double prefix) const;
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t leaf0_;
  std::vector<double> tree_;
};

struct ReplaySample {
  std::vector<std::size_t> indices;
  std::vector<double> probabilities;
  std::vector<double> weights;  // (N P(i))^-beta / max over the batch
};

// Proportional prioritized replay: P(i) = p_i^alpha / sum_j p_j^alpha.
class PrioritizedReplayBuffer {
 public:
  PrioritizedReplayBuffer(std::size_t capacity, double alpha, double priority_eps);

  // New transitions enter with the largest priority seen so far.
  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return items_.size(); }
  double alpha() const { return alpha_; }

  const Transition& at(std::size_t i) const { return items_.at(i); }
  double probability(std::size_t i) const;
  double total_mass() const { return tree_.total(); }

  ReplaySample sample(std::size_t n, double beta, Rng& rng) const;
  void update_priorities(const std::vector<std::size_t>& indices, const std::vector<double>& td_errors);

 private:
  std::vector<Transition> items_;
  SumTree tree_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double alpha_;
  double priority_eps_;
  double max_priority_ = 1.0;
};

}  // namespace safelight::agents
