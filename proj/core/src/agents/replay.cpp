#include "safelight/agents/replay.hpp"

#include <algorithm>
#include <cmath>

#include "safelight/common/error.hpp"

namespace safelight::agents {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay.capacity", "must be positive");
  leaf0_ = 1;
  while (leaf0_ < capacity) leaf0_ <<= 1;
  tree_.assign(2 * leaf0_, 0.0);
}

void SumTree::set(std::size_t index, double value) {
  std::size_t node = leaf0_ + index;
  tree_[node] = value;
  for (node >>= 1; node >= 1; node >>= 1) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
}

std::size_t SumTree::find(double prefix) const {
  std::size_t node = 1;
  while (node < leaf0_) {
    const double left = tree_[2 * node];
    if (prefix < left || tree_[2 * node + 1] <= 0.0) {
      node = 2 * node;
    } else {
      prefix -= left;
      node = 2 * node + 1;
    }
  }
  return std::min(node - leaf0_, capacity_ - 1);
}

PrioritizedReplayBuffer::PrioritizedReplayBuffer(std::size_t capacity, double alpha, double priority_eps)
    : items_(capacity), tree_(capacity), alpha_(alpha), priority_eps_(priority_eps) {}

void PrioritizedReplayBuffer::push(Transition t) {
  t.priority = max_priority_;
  tree_.set(next_, std::pow(t.priority, alpha_));
  items_[next_] = std::move(t);
  next_ = (next_ + 1) % items_.size();
  size_ = std::min(size_ + 1, items_.size());
}

double PrioritizedReplayBuffer::probability(std::size_t i) const {
  if (i >= size_) return 0.0;
  return tree_.get(i) / tree_.total();
}

ReplaySample PrioritizedReplayBuffer::sample(std::size_t n, double beta, Rng& rng) const {
  if (size_ == 0) throw Error("sampling from an empty replay buffer");
  ReplaySample s;
  s.indices.reserve(n);
  const double total = tree_.total();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = tree_.find(rng.uniform() * total);
    if (i >= size_) i = size_ - 1;
    s.indices.push_back(i);
    s.probabilities.push_back(tree_.get(i) / total);
  }
  double max_w = 0.0;
  for (double p : s.probabilities) {
    const double w = std::pow(static_cast<double>(size_) * p, -beta);
    s.weights.push_back(w);
    max_w = std::max(max_w, w);
  }
  for (auto& w : s.weights) w /= max_w;
  return s;
}

void PrioritizedReplayBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                                const std::vector<double>& td_errors) {
  if (indices.size() != td_errors.size()) throw DimensionError("td errors", indices.size(), td_errors.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double p = std::abs(td_errors[k]) + priority_eps_;
    items_.at(indices[k]).priority = p;
    tree_.set(indices[k], std::pow(p, alpha_));
    max_priority_ = std::max(max_priority_, p);
  }
}

}  // namespace safelight::agents
