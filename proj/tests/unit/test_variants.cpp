#include <gtest/gtest.h>

#include "safelight/common/error.hpp"
#include "safelight/nn/losses.hpp"
#include "safelight/variants/objectives.hpp"
#include "safelight/variants/variant.hpp"

using namespace safelight;
using namespace safelight::variants;

namespace {

safety::SafetyVerdict verdict(std::vector<bool> unsafe) {
  safety::SafetyVerdict v;
  v.unsafe = std::move(unsafe);
  return v;
}

}  // namespace

TEST(Variant, NamesRoundTrip) {
  for (auto k : {VariantKind::act, VariantKind::loss, VariantKind::reward, VariantKind::state_and_reward,
                 VariantKind::state_and_loss, VariantKind::syn_r, VariantKind::syn_q, VariantKind::backbone,
                 VariantKind::fixed_time})
    EXPECT_EQ(variant_from_string(to_string(k)), k);
  EXPECT_THROW(variant_from_string("safelight-xl"), ConfigError);
}

TEST(Variant, WeightsOnlyApplyToTheirVariant) {
  VariantConfig c;
  c.lambda2 = 0.5;
  c.lambda_shaping = 10;
  c.kind = VariantKind::backbone;
  EXPECT_EQ(c.loss_kl_weight(), 0.0);
  EXPECT_EQ(c.shaping_weight(), 0.0);
  c.kind = VariantKind::loss;
  EXPECT_EQ(c.loss_kl_weight(), 0.5);
  EXPECT_EQ(c.shaping_weight(), 0.0);
  c.kind = VariantKind::state_and_reward;
  EXPECT_EQ(c.shaping_weight(), 10.0);
  EXPECT_TRUE(c.embeds_safety());
  c.kind = VariantKind::act;
  EXPECT_TRUE(c.filters());
  c.act_filter = false;
  EXPECT_FALSE(c.filters());
  c.kind = VariantKind::fixed_time;
  EXPECT_FALSE(c.learns());
}

TEST(Variant, ValidationNamesTheField) {
  VariantConfig c;
  c.lambda2 = -1;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "variant.lambda2");
  }
  c = VariantConfig{};
  c.kind = VariantKind::state_and_loss;
  c.embedding_dim = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Variant, JsonRoundTrip) {
  VariantConfig c;
  c.kind = VariantKind::syn_q;
  c.u1 = 0.3;
  c.u2 = 0.7;
  const auto back = variant_config_from_json(to_json(c));
  EXPECT_EQ(back.kind, VariantKind::syn_q);
  EXPECT_EQ(back.u2, 0.7);
}

TEST(Objectives, ShapedRewardIsPenaltyOnUnsafeOnly) {
  const std::vector<double> adv{0.2, -0.1, 0.4};
  const auto v = verdict({true, false, false});
  EXPECT_EQ(shaped_reward(-3.0, v, adv, 1, 10.0), -3.0);
  const double kl = safety_kl(v, adv, 0);
  EXPECT_GT(kl, 0.0);
  EXPECT_DOUBLE_EQ(shaped_reward(-3.0, v, adv, 0, 10.0), -3.0 - 10.0 * kl);
  EXPECT_EQ(shaped_reward(-3.0, v, adv, 0, 0.0), -3.0);
  EXPECT_EQ(safety_kl(verdict({}), adv, 0), 0.0);
}

TEST(Objectives, SafetyKlMatchesDefinition) {
  const std::vector<double> adv{1.0, 0.0, -1.0, 0.5};
  const auto v = verdict({true, true, false, false});
  const auto p = nn::softmax(adv);
  const double safe = p[2] + p[3];
  const double keep = 1.0 - 2e-6;
  const std::vector<double> target{1e-6, 1e-6, p[2] / safe * keep, p[3] / safe * keep};
  double kl = 0.0;
  for (int i = 0; i < 4; ++i) kl += target[i] * std::log(target[i] / p[i]);
  EXPECT_NEAR(safety_kl(v, adv, 1), kl, 1e-12);
}

TEST(Objectives, SynRAndSafetyReward) {
  EXPECT_EQ(safety_reward(0, 1000.0), 0.0);
  EXPECT_EQ(safety_reward(3, 1000.0), -3000.0);
  EXPECT_EQ(syn_r_reward(-20.0, -1000.0, 1.0, 5.0), -5020.0);
}

TEST(Objectives, SynQSelectCombinesHeads) {
  const std::vector<double> qm{1.0, 2.0, 3.0}, qs{0.0, 0.0, -10.0};
  EXPECT_EQ(syn_q_select(qm, qs, 0.5, 0.5), 1);
  EXPECT_EQ(syn_q_select(qm, qs, 1.0, 0.0), 2);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(syn_q_select(qm, bad, 0.5, 0.5), DimensionError);
}
