#include "safelight/safety/embedding.hpp"

#include "safelight/common/error.hpp"

namespace safelight::safety {

SafetyEmbedding::SafetyEmbedding(std::size_t flag_dim, std::size_t dim, Rng& rng) : flag_dim_(flag_dim), dim_(dim) {
  if (dim_ > 0) layer_ = nn::Mlp({flag_dim_, dim_}, nn::Activation::relu, nn::Activation::relu, rng);
}

SafetyEmbedding SafetyEmbedding::zeros(std::size_t flag_dim, std::size_t dim) {
  SafetyEmbedding e;
  e.flag_dim_ = flag_dim;
  e.dim_ = dim;
  if (dim > 0) e.layer_ = nn::Mlp::zeros({flag_dim, dim}, nn::Activation::relu, nn::Activation::relu);
  return e;
}

SafetyEmbedding SafetyEmbedding::from_layer(nn::Mlp layer) {
  if (layer.depth() != 1) throw ConfigError("embedding", "expected a single layer");
  SafetyEmbedding e;
  e.flag_dim_ = layer.input_dim();
  e.dim_ = layer.output_dim();
  e.layer_ = std::move(layer);
  return e;
}

std::vector<double> SafetyEmbedding::embed(std::span<const double> flags) const {
  if (flags.size() != flag_dim_) throw DimensionError("safety flags", flag_dim_, flags.size());
  if (dim_ == 0) return {};
  return layer_.forward(flags);
}

std::vector<double> augmented_state(std::span<const double> base, const SafetyVerdict& verdict,
                                    const SafetyEmbedding& embedding) {
  std::vector<double> out(base.begin(), base.end());
  if (!embedding.enabled()) return out;
  const auto e = embedding.embed(verdict);
  out.insert(out.end(), e.begin(), e.end());
  return out;
}

}  // namespace safelight::safety
