#include "safelight/variants/variant.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "safelight/common/error.hpp"

namespace safelight::variants {

namespace {

constexpr std::array<std::pair<VariantKind, const char*>, 9> kNames{{
    {VariantKind::act, "act"},
    {VariantKind::loss, "loss"},
    {VariantKind::reward, "reward"},
    {VariantKind::state_and_reward, "state_and_reward"},
    {VariantKind::state_and_loss, "state_and_loss"},
    {VariantKind::syn_r, "syn_r"},
    {VariantKind::syn_q, "syn_q"},
    {VariantKind::backbone, "backbone"},
    {VariantKind::fixed_time, "fixed_time"},
}};

}  // namespace

const char* to_string(VariantKind k) {
  for (const auto& [kind, name] : kNames)
    if (kind == k) return name;
  return "?";
}

VariantKind variant_from_string(const std::string& name) {
  for (const auto& [kind, n] : kNames)
    if (name == n) return kind;
  throw ConfigError("variant.kind", "unknown variant '" + name + "'");
}

void VariantConfig::validate() const {
  auto finite_nonneg = [](const char* field, double v) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(field, "must be finite and >= 0");
  };
  if (!std::isfinite(lambda1) || lambda1 <= 0.0) throw ConfigError("variant.lambda1", "must be > 0");
  finite_nonneg("variant.lambda2", lambda2);
  finite_nonneg("variant.lambda_shaping", lambda_shaping);
  finite_nonneg("variant.w1", w1);
  finite_nonneg("variant.w2", w2);
  finite_nonneg("variant.u1", u1);
  finite_nonneg("variant.u2", u2);
  finite_nonneg("variant.collision_penalty_s", collision_penalty_s);
  if (embeds_safety() && embedding_dim == 0) throw ConfigError("variant.embedding_dim", "must be > 0 for state variants");
}

double VariantConfig::loss_kl_weight() const {
  return kind == VariantKind::loss || kind == VariantKind::state_and_loss ? lambda2 : 0.0;
}

double VariantConfig::shaping_weight() const {
  return kind == VariantKind::reward || kind == VariantKind::state_and_reward ? lambda_shaping : 0.0;
}

bool VariantConfig::embeds_safety() const {
  return kind == VariantKind::state_and_reward || kind == VariantKind::state_and_loss;
}

VariantConfig variant_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("variant", "expected an object");
  VariantConfig c;
  try {
    if (j.contains("kind")) c.kind = variant_from_string(j.at("kind").get<std::string>());
    c.lambda1 = j.value("lambda1", c.lambda1);
    c.lambda2 = j.value("lambda2", c.lambda2);
    c.lambda_shaping = j.value("lambda_shaping", c.lambda_shaping);
    c.w1 = j.value("w1", c.w1);
    c.w2 = j.value("w2", c.w2);
    c.u1 = j.value("u1", c.u1);
    c.u2 = j.value("u2", c.u2);
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    c.collision_penalty_s = j.value("collision_penalty_s", c.collision_penalty_s);
    c.act_filter = j.value("act_filter", c.act_filter);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("variant", e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const VariantConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"lambda1", c.lambda1},
          {"lambda2", c.lambda2},
          {"lambda_shaping", c.lambda_shaping},
          {"w1", c.w1},
          {"w2", c.w2},
          {"u1", c.u1},
          {"u2", c.u2},
          {"embedding_dim", c.embedding_dim},
          {"collision_penalty_s", c.collision_penalty_s},
          {"act_filter", c.act_filter}};
}

}  // namespace safelight::variants
