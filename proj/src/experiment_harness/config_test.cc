// Copyright 2026 The Residual Perturbation Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "experiment_harness/config.h"

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace rp::harness {
namespace {

using ::testing::HasSubstr;

TEST(ConfigTest, ParsesKeysCommentsAndLists) {
  auto config = ParseConfig(
      "# sweep\n"
      "kind = attack\n"
      "seed = 7   # trailing comment\n"
      "noise.strategy = additive\n"
      "noise.gamma_sweep = 0, 0.5, 1\n"
      "ensemble.sizes = 1,3\n"
      "train.lr_schedule = 20:4,40:4\n"
      "\n");
  ASSERT_TRUE(config.ok()) << config.status();
  EXPECT_EQ(config->kind, ExperimentKind::kAttack);
  EXPECT_EQ(config->seed, 7u);
  EXPECT_EQ(config->noise_strategy, model::NoiseStrategy::kAdditive);
  EXPECT_EQ(GammaValues(*config), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(EnsembleSizes(*config), (std::vector<std::size_t>{1, 3}));
  ASSERT_EQ(config->train.lr_schedule.size(), 2u);
  EXPECT_EQ(config->train.lr_schedule[1].epoch, 40);
}

TEST(ConfigTest, DashedKindNamesAccepted) {
  auto config = ParseConfig("kind = dpsgd-compare\n");
  ASSERT_TRUE(config.ok());
  EXPECT_EQ(config->kind, ExperimentKind::kDpsgdCompare);
}

TEST(ConfigTest, ErrorsCiteLineNumber) {
  auto unknown = ParseConfig("seed = 1\nnot.a.key = 3\n");
  ASSERT_FALSE(unknown.ok());
  EXPECT_THAT(unknown.status().message(), HasSubstr("line 2"));
  auto bad_value = ParseConfig("seed = 1\n\ntrain.epochs = many\n");
  ASSERT_FALSE(bad_value.ok());
  EXPECT_THAT(bad_value.status().message(), HasSubstr("line 3"));
  auto no_equals = ParseConfig("kind attack\n");
  ASSERT_FALSE(no_equals.ok());
  EXPECT_THAT(no_equals.status().message(), HasSubstr("line 1"));
}

TEST(ConfigTest, ValidateRejectsBadValues) {
  ExperimentConfig config = DefaultConfig();
  EXPECT_TRUE(config.Validate().ok());
  config.threads = 0;
  EXPECT_FALSE(config.Validate().ok());
  config = DefaultConfig();
  config.noise_gamma = -1.0;
  EXPECT_FALSE(config.Validate().ok());
  config = DefaultConfig();
  config.dataset.test_fraction = 1.0;
  EXPECT_FALSE(config.Validate().ok());
}

TEST(ConfigTest, RenderRoundTrips) {
  ExperimentConfig config = DefaultConfig();
  ASSERT_TRUE(ApplySetting(config, "noise.gamma_sweep", "0.25,1.5").ok());
  ASSERT_TRUE(ApplySetting(config, "kind", "rademacher").ok());
  ASSERT_TRUE(ApplySetting(config, "dataset.label_column", "y").ok());
  auto reparsed = ParseConfig(RenderConfig(config));
  ASSERT_TRUE(reparsed.ok()) << reparsed.status();
  EXPECT_EQ(ResolvedSettings(*reparsed), ResolvedSettings(config));
}

TEST(ConfigTest, RuntimeKeysExcludedOnRequest) {
  ExperimentConfig config = DefaultConfig();
  auto all = ResolvedSettings(config, true);
  auto stable = ResolvedSettings(config, false);
  EXPECT_TRUE(all.count("threads"));
  EXPECT_TRUE(all.count("out"));
  EXPECT_FALSE(stable.count("threads"));
  EXPECT_FALSE(stable.count("out"));
  EXPECT_EQ(all.size(), stable.size() + 2);
}

TEST(ConfigTest, EveryKeyDocumented) {
  auto docs = ConfigKeyDocs();
  auto settings = ResolvedSettings(DefaultConfig());
  EXPECT_EQ(docs.size(), settings.size());
  for (const auto& [key, doc] : docs) {
    EXPECT_TRUE(settings.count(key)) << key;
    EXPECT_FALSE(doc.empty()) << key;
  }
}

TEST(ConfigTest, AutoPiIsHalfGamma) {
  ExperimentConfig config = DefaultConfig();
  config.noise_strategy = model::NoiseStrategy::kAdditive;
  EXPECT_DOUBLE_EQ(NoiseFor(config, 2.0).pi, 1.0);
  config.noise_pi = 0.3;
  EXPECT_DOUBLE_EQ(NoiseFor(config, 2.0).pi, 0.3);
}

}  // namespace
}  // namespace rp::harness
