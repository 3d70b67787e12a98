#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

namespace safelight::variants {

enum class VariantKind { act, loss, reward, state_and_reward, state_and_loss, syn_r, syn_q, backbone, fixed_time };

const char* to_string(VariantKind k);
VariantKind variant_from_string(const std::string& name);

struct VariantConfig {
  VariantKind kind = VariantKind::backbone;
  double lambda1 = 1.0;
  double lambda2 = 0.5;
  double lambda_shaping = 10.0;  // seconds of waiting per nat of KL
  double w1 = 1.0;
  double w2 = 5.0;
  double u1 = 0.5;
  double u2 = 0.5;
  std::size_t embedding_dim = 16;
  double collision_penalty_s = 1000.0;
  bool act_filter = true;  // only read by the act variant

  void validate() const;

  bool learns() const { return kind != VariantKind::fixed_time; }
  bool filters() const { return kind == VariantKind::act && act_filter; }
  // Weight of the KL term in the training loss; zero outside the loss variants.
  double loss_kl_weight() const;
  // Weight of the KL penalty in the reward; zero outside the reward variants.
  double shaping_weight() const;
  bool embeds_safety() const;
  bool two_heads() const { return kind == VariantKind::syn_q; }
};

VariantConfig variant_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const VariantConfig& c);

}  // namespace safelight::variants
