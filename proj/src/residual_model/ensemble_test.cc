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

#include "residual_model/ensemble.h"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "nn_core/loss.h"
#include "nn_core/synthetic.h"

namespace rp::model {
namespace {

using nn::Tensor;

NetSpec LinearSpec() {
  NetSpec spec;
  spec.input_dim = 2;
  spec.num_blocks = 1;
  spec.num_outputs = 2;
  spec.batch_norm = false;
  spec.activation = nn::ActivationKind::kIdentity;
  return spec;
}

// Member whose softmax at x = (1, 0) is (p, 1 - p).
ResidualNet FixedMember(double p) {
  auto net = ResidualNet::Create(LinearSpec(), NoiseConfig::None(), 0);
  net->blocks()[0].linear.weight.Fill(0.0);
  net->head().weight.storage() = {std::log(p), 0.0, std::log(1 - p), 0.0};
  return *net;
}

TEST(EnsembleTest, ArithmeticMeanOfSoftmax) {
  EnsembleModel ens;
  ens.members = {FixedMember(0.8), FixedMember(0.6)};
  nn::Rng rng(0);
  auto probs = EnsemblePredict(ens, nn::AsBatch(std::vector<double>{1, 0}),
                               rng);
  ASSERT_TRUE(probs.ok());
  EXPECT_NEAR((*probs)[0], 0.7, 1e-15);
  EXPECT_NEAR((*probs)[1], 0.3, 1e-15);
}

TEST(EnsembleTest, SingleMemberEqualsSoftmax) {
  auto ens = EnsembleModel::Create(LinearSpec(), NoiseConfig::None(), 1, 5);
  ASSERT_TRUE(ens.ok());
  Tensor x = Tensor::Matrix(4, 2);
  nn::Rng data(1);
  data.FillNormal(x.values());
  nn::Rng r1(2), r2(2);
  auto probs = EnsemblePredict(*ens, x, r1);
  auto logits = ens->members[0].Forward(x, nn::Mode::kEval, r2);
  ASSERT_TRUE(probs.ok() && logits.ok());
  for (std::size_t n = 0; n < 4; ++n) {
    const auto p = nn::Softmax(logits->row(n));
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(probs->at(n, k), p[k]);
  }
}

TEST(EnsembleTest, IdenticalMembersEqualOneMember) {
  NetSpec spec = LinearSpec();
  spec.num_blocks = 3;
  spec.batch_norm = true;
  spec.num_outputs = 4;
  auto one = ResidualNet::Create(spec, NoiseConfig::None(), 8);
  ASSERT_TRUE(one.ok());
  EnsembleModel single{{*one}};
  EnsembleModel five{{*one, *one, *one, *one, *one}};
  Tensor x = Tensor::Matrix(6, 2);
  nn::Rng data(1);
  data.FillNormal(x.values());
  nn::Rng r1(2), r2(3);
  auto a = EnsemblePredict(single, x, r1);
  auto b = EnsemblePredict(five, x, r2);
  ASSERT_TRUE(a.ok() && b.ok());
  for (std::size_t i = 0; i < a->size(); ++i) {
    EXPECT_NEAR((*a)[i], (*b)[i], 1e-15);
  }
}

TEST(EnsembleTest, RowsSumToOne) {
  NetSpec spec = LinearSpec();
  spec.input_dim = 5;
  spec.num_outputs = 7;
  auto ens = EnsembleModel::Create(spec, NoiseConfig::Additive(1.0), 4, 2);
  ASSERT_TRUE(ens.ok());
  Tensor x = Tensor::Matrix(50, 5);
  nn::Rng rng(1);
  rng.FillNormal(x.values(), 3.0);
  auto probs = EnsemblePredict(*ens, x, rng);
  ASSERT_TRUE(probs.ok());
  for (std::size_t n = 0; n < 50; ++n) {
    const auto row = probs->row(n);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(EnsembleTest, MembersAreIndependentlyInitialized) {
  auto ens = EnsembleModel::Create(LinearSpec(), NoiseConfig::None(), 2, 5);
  ASSERT_TRUE(ens.ok());
  EXPECT_NE(ens->members[0].head().weight, ens->members[1].head().weight);
  EXPECT_FALSE(EnsembleModel::Create(LinearSpec(), NoiseConfig::None(), 0, 5)
                   .ok());
}

TEST(EnsembleTest, TrainingIsIndependentOfThreadCount) {
  nn::Rng data_rng(3);
  auto data = nn::MakeBlobs(64, 4, 2, 2.0, 1.0, data_rng);
  ASSERT_TRUE(data.ok());
  NetSpec spec = LinearSpec();
  spec.input_dim = 4;
  spec.batch_norm = true;
  spec.activation = nn::ActivationKind::kRelu;
  TrainConfig config;
  config.epochs = 3;
  config.batch_size = 16;
  config.seed = 11;
  auto a = EnsembleModel::Create(spec, NoiseConfig::Additive(0.5), 3, 1);
  auto b = EnsembleModel::Create(spec, NoiseConfig::Additive(0.5), 3, 1);
  ASSERT_TRUE(a.ok() && b.ok());
  auto ha = TrainEnsemble(*a, *data, nullptr, config, 1);
  auto hb = TrainEnsemble(*b, *data, nullptr, config, 3);
  ASSERT_TRUE(ha.ok() && hb.ok());
  for (std::size_t i = 0; i < 3; ++i) {
    auto pa = a->members[i].Parameters();
    auto pb = b->members[i].Parameters();
    for (std::size_t p = 0; p < pa.size(); ++p) EXPECT_EQ(*pa[p], *pb[p]);
  }
  EXPECT_EQ(ha->train_accuracy, hb->train_accuracy);
  EXPECT_NE(*a->members[0].Parameters()[0], *a->members[1].Parameters()[0]);
}

}  // namespace
}  // namespace rp::model
