#pragma once

#include <span>
#include <vector>

#include "safelight/common/rng.hpp"
#include "safelight/nn/mlp.hpp"
#include "safelight/safety/safety_model.hpp"

namespace safelight::safety {

// Embed(π_H) = ReLU(flags · W_e + b_e), flags being the per-action unsafe
// vector. dim() == 0 disables it and draws nothing from the RNG.
class SafetyEmbedding {
 public:
  SafetyEmbedding() = default;
  SafetyEmbedding(std::size_t flag_dim, std::size_t dim, Rng& rng);
  static SafetyEmbedding zeros(std::size_t flag_dim, std::size_t dim);
  static SafetyEmbedding from_layer(nn::Mlp layer);

  std::size_t dim() const { return dim_; }
  std::size_t flag_dim() const { return flag_dim_; }
  bool enabled() const { return dim_ > 0; }

  std::vector<double> embed(std::span<const double> flags) const;
  std::vector<double> embed(const SafetyVerdict& verdict) const { return embed(verdict.flag_vector()); }

  nn::Mlp& layer() { return layer_; }
  const nn::Mlp& layer() const { return layer_; }

 private:
  std::size_t flag_dim_ = 0;
  std::size_t dim_ = 0;
  nn::Mlp layer_;
};

// concat(base, embedding(flags)); base unchanged when the embedding is disabled.
std::vector<double> augmented_state(std::span<const double> base, const SafetyVerdict& verdict,
                                    const SafetyEmbedding& embedding);

}  // namespace safelight::safety
