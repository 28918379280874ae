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

#include "membership_attack/attack_model.h"

#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "membership_attack/metrics.h"

namespace rp::attack {
namespace {

TEST(TopKTest, Examples) {
  EXPECT_EQ(TopK(std::vector<double>{0.3, 0.7}, 2),
            (std::vector<double>{0.7, 0.3}));
  const std::vector<double> uniform(10, 0.1);
  EXPECT_EQ(TopK(uniform, 3), (std::vector<double>{0.1, 0.1, 0.1}));
  const std::vector<double> p = {0.1, 0.5, 0.15, 0.25};
  const auto full = TopK(p, 4);
  EXPECT_EQ(full, (std::vector<double>{0.5, 0.25, 0.15, 0.1}));
  EXPECT_NEAR(std::accumulate(full.begin(), full.end(), 0.0), 1.0, 1e-12);
}

TEST(ExtractFeaturesTest, SortedProbabilities) {
  model::NetSpec spec;
  spec.input_dim = 3;
  spec.num_outputs = 4;
  auto ens = model::EnsembleModel::Create(spec, model::NoiseConfig::None(), 2,
                                          1);
  ASSERT_TRUE(ens.ok());
  nn::Tensor x = nn::Tensor::Matrix(6, 3);
  nn::Rng rng(2);
  rng.FillNormal(x.values());
  auto f = ExtractFeatures(*ens, x, 3, rng);
  ASSERT_TRUE(f.ok());
  for (const auto& row : *f) {
    ASSERT_EQ(row.size(), 3u);
    EXPECT_GE(row[0], row[1]);
    EXPECT_GE(row[1], row[2]);
    EXPECT_LE(row[0], 1.0);
    EXPECT_GE(row[2], 0.0);
  }
  EXPECT_FALSE(ExtractFeatures(*ens, x, 5, rng).ok());
}

// Members look confident (top prob near 1), non-members near 0.5.
std::vector<FeatureRecord> SeparableRecords(std::size_t n, nn::Rng& rng) {
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool member = i % 2 == 0;
    const double top = member ? rng.Uniform(0.95, 1.0) : rng.Uniform(0.5, 0.6);
    out.push_back({{top, 1 - top}, member ? 1 : 0});
  }
  return out;
}

TEST(AttackModelTest, LearnsSeparableFeatures) {
  nn::Rng rng(3);
  const auto records = SeparableRecords(400, rng);
  auto model = AttackModel::Train(records, AttackConfig{}, rng);
  ASSERT_TRUE(model.ok()) << model.status();
  EXPECT_GE(model->train_accuracy(), 0.95);
  EXPECT_GT(model->MembershipScore(std::vector<double>{0.99, 0.01}), 0.5);
  EXPECT_LT(model->MembershipScore(std::vector<double>{0.55, 0.45}), 0.5);
}

TEST(AttackModelTest, ShuffledLabelsGiveChanceAuc) {
  double auc_sum = 0.0;
  for (int seed = 0; seed < 5; ++seed) {
    nn::Rng rng(100 + seed);
    auto train = SeparableRecords(400, rng);
    auto held_out = SeparableRecords(400, rng);
    for (auto* set : {&train, &held_out}) {
      std::vector<int> labels;
      for (const auto& r : *set) labels.push_back(r.label);
      rng.Shuffle(std::span<int>(labels));
      for (std::size_t i = 0; i < set->size(); ++i) {
        (*set)[i].label = labels[i];
      }
    }
    auto model = AttackModel::Train(train, AttackConfig{}, rng);
    ASSERT_TRUE(model.ok());
    std::vector<double> pos, neg;
    for (const auto& r : held_out) {
      (r.label ? pos : neg).push_back(model->MembershipScore(r.features));
    }
    auto report = BuildAttackReport(pos, neg, DefaultThresholds());
    ASSERT_TRUE(report.ok());
    auc_sum += report->auc;
  }
  const double mean_auc = auc_sum / 5;
  EXPECT_GE(mean_auc, 0.4);
  EXPECT_LE(mean_auc, 0.6);
}

TEST(AttackModelTest, DeterministicPerSeed) {
  nn::Rng data_rng(5);
  const auto records = SeparableRecords(100, data_rng);
  nn::Rng a(9), b(9);
  AttackConfig config;
  config.epochs = 5;
  auto m1 = AttackModel::Train(records, config, a);
  auto m2 = AttackModel::Train(records, config, b);
  ASSERT_TRUE(m1.ok() && m2.ok());
  for (double top = 0.5; top <= 1.0; top += 0.05) {
    const std::vector<double> f = {top, 1 - top};
    EXPECT_EQ(m1->MembershipScore(f), m2->MembershipScore(f));
  }
}

TEST(AttackModelTest, RejectsSingleClass) {
  std::vector<FeatureRecord> records = {{{0.9, 0.1}, 1}, {{0.8, 0.2}, 1}};
  nn::Rng rng(0);
  EXPECT_FALSE(AttackModel::Train(records, AttackConfig{}, rng).ok());
  records.push_back({{0.5}, 0});
  EXPECT_FALSE(AttackModel::Train(records, AttackConfig{}, rng).ok());
}

}  // namespace
}  // namespace rp::attack
