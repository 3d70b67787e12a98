#pragma once

#include <span>
#include <vector>

#include "safelight/common/rng.hpp"
#include "safelight/nn/mlp.hpp"
#include "safelight/safety/embedding.hpp"

namespace safelight::agents {

struct DuelingGradients {
  nn::MlpGradients embedding;
  nn::MlpGradients trunk;
  nn::MlpGradients value;
  nn::MlpGradients advantage;

  std::vector<std::span<const double>> views() const;
  void scale(double f);
  double squared_norm() const;
};

struct DuelingCache {
  nn::ForwardCache embedding;
  nn::ForwardCache trunk;
  nn::ForwardCache value;
  nn::ForwardCache advantage;
  nn::Matrix q;  // batch x actions
};

// Q(s,a) = V(s) + A(s,a) - mean_a' A(s,a'). With a safety embedding the last
// `actions` entries of the input are the unsafe-flag vector; they go through
// the embedding and the result is concatenated to the base state before the
// trunk.
class DuelingQNetwork {
 public:
  DuelingQNetwork() = default;
  DuelingQNetwork(std::size_t base_dim, std::size_t actions, const std::vector<std::size_t>& hidden,
                  std::size_t embed_dim, Rng& rng);

  static DuelingQNetwork from_parts(std::size_t base_dim, std::size_t actions, safety::SafetyEmbedding embedding,
                                    nn::Mlp trunk, nn::Mlp value, nn::Mlp advantage);

  std::size_t input_dim() const { return base_dim_ + (embedding_.enabled() ? actions_ : 0); }
  std::size_t base_dim() const { return base_dim_; }
  std::size_t actions() const { return actions_; }
  std::size_t embed_dim() const { return embedding_.dim(); }

  std::vector<double> q_values(std::span<const double> state) const;
  std::vector<double> advantages(std::span<const double> state) const;
  double value(std::span<const double> state) const;

  nn::Matrix q_batch(const nn::Matrix& states) const;
  DuelingCache forward(const nn::Matrix& states) const;
  // dq: d loss / d Q (batch x actions); da_extra: additional d loss / d A
  // (e.g. from a KL term on softmax(A)), may be empty.
  DuelingGradients backward(const DuelingCache& cache, const nn::Matrix& dq, const nn::Matrix& da_extra) const;

  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;

  safety::SafetyEmbedding& embedding() { return embedding_; }
  const safety::SafetyEmbedding& embedding() const { return embedding_; }
  nn::Mlp& trunk() { return trunk_; }
  const nn::Mlp& trunk() const { return trunk_; }
  nn::Mlp& value_head() { return value_; }
  const nn::Mlp& value_head() const { return value_; }
  nn::Mlp& advantage_head() { return advantage_; }
  const nn::Mlp& advantage_head() const { return advantage_; }

  bool same_architecture(const DuelingQNetwork& o) const;
  void copy_from(const DuelingQNetwork& o, double tau);

 private:
  nn::Matrix trunk_input(const nn::Matrix& states, DuelingCache* cache) const;

  std::size_t base_dim_ = 0;
  std::size_t actions_ = 0;
  safety::SafetyEmbedding embedding_;
  nn::Mlp trunk_;
  nn::Mlp value_;
  nn::Mlp advantage_;
};

}  // namespace safelight::agents
