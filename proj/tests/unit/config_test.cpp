#include <gtest/gtest.h>

#include <string>

#include "vgkit/config.hpp"

using namespace vgkit;

TEST(ConfigMap, ParsesCommentsAndDottedKeys) {
  const auto m = ConfigMap::parse_string("# header\ntrain.lr = 0.01  # inline\n\ndata.preset=mid\n");
  EXPECT_EQ(*m.get("train.lr"), "0.01");
  EXPECT_EQ(*m.get("data.preset"), "mid");
  EXPECT_FALSE(m.get("train.seed"));
}

TEST(ConfigMap, ErrorsNameTheLine) {
  try {
    ConfigMap::parse_string("train.lr = 1\nbogus line\n", "x.cfg");
    FAIL() << "no throw";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ConfigMap::parse_string("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(ConfigMap::parse_string("Bad-Key = 1\n"), ConfigError);
  ConfigMap m;
  EXPECT_THROW(m.set_assignment("novalue"), ConfigError);
}

TEST(Resolve, DefaultsAndOverrides) {
  ConfigMap m;
  m.set_assignment("train.iterations=50");
  m.set_assignment("loss.variant=softmax_single_label");
  m.set_assignment("data.feature_dim=16");
  const RunConfig c = resolve(m);
  EXPECT_EQ(c.train.iterations, 50u);
  EXPECT_EQ(c.train.loss.variant, RankingVariant::softmax_single_label);
  EXPECT_EQ(c.train.dims.feature_dim, 16u);
  EXPECT_EQ(c.train.batch_size, 64u);
  EXPECT_EQ(c.ablate_cells, default_ablation_cells());
}

TEST(Resolve, PresetAppliedBeforeQualityKeys) {
  const auto c = resolve(ConfigMap::parse_string("data.quality.jitter = 0.5\ndata.preset = low\n"));
  EXPECT_EQ(c.data.quality.jitter, 0.5);
  EXPECT_EQ(c.data.quality.miss_prob, quality_preset(QualityPreset::low).miss_prob);
}

TEST(Resolve, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(resolve(ConfigMap::parse_string("train.lrate = 1\n")), ConfigError);
  EXPECT_THROW(resolve(ConfigMap::parse_string("train.iterations = -3\n")), ConfigError);
  EXPECT_THROW(resolve(ConfigMap::parse_string("train.lr = abc\n")), ConfigError);
  EXPECT_THROW(resolve(ConfigMap::parse_string("loss.eta = 1.5\n")), ConfigError);
  EXPECT_THROW(resolve(ConfigMap::parse_string("train.batch_size = 0\n")), ConfigError);
  EXPECT_THROW(resolve(ConfigMap::parse_string("ablate.cells = high/hinge\n")), ConfigError);
  EXPECT_THROW(resolve(ConfigMap::parse_string("data.preset = ultra\n")), ConfigError);
}

TEST(Resolve, CanonicalTextRoundTrips) {
  const auto c = resolve(ConfigMap::parse_string("train.lr = 0.003\nablate.cells = mid/kld,high/softmax+reg\n"));
  const std::string text = to_config_text(c);
  const auto again = resolve(ConfigMap::parse_string(text));
  EXPECT_EQ(to_config_text(again), text);
  EXPECT_EQ(config_fingerprint(again), config_fingerprint(c));
  EXPECT_EQ(again.ablate_cells.size(), 2u);
  for (const auto& k : known_config_keys()) EXPECT_NE(text.find(k + " = "), std::string::npos) << k;
}

TEST(AblationCell, ParseAndName) {
  const auto c = parse_ablation_cell("low/kld+reg");
  EXPECT_EQ(c.preset, "low");
  EXPECT_TRUE(c.regression);
  EXPECT_EQ(c.name(), "low/kld+reg");
  EXPECT_EQ(parse_ablation_cell("high/softmax_single_label").name(), "high/softmax");
  EXPECT_THROW(parse_ablation_cell("highkld"), ConfigError);
}

TEST(Profiles, ShippedProfilesResolve) {
  for (const char* name : {"desk.cfg", "paper.cfg"}) {
    const auto c = resolve(ConfigMap::load(std::string(VGKIT_SOURCE_DIR) + "/profiles/" + name));
    EXPECT_GT(c.train.iterations, 0u) << name;
  }
  const auto desk = resolve(ConfigMap::load(std::string(VGKIT_SOURCE_DIR) + "/profiles/desk.cfg"));
  EXPECT_EQ(desk.data.train_size, 2000u);
  EXPECT_EQ(desk.data.val_size, 250u);
  EXPECT_EQ(desk.data.test_size, 500u);
  EXPECT_EQ(desk.data.num_proposals, 8u);
  EXPECT_EQ(desk.data.preset, "high");
}
