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

#include "dpsgd_baseline/dpsgd.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "nn_core/synthetic.h"

namespace rp::dpsgd {
namespace {

TEST(ClipTest, ShortGradientUnchanged) {
  const std::vector<double> g = {0.3, 0.4};
  EXPECT_EQ(ClipVector(g, 1.0), g);
}

TEST(ClipTest, LongGradientScaledToBound) {
  const auto c = ClipVector(std::vector<double>{3.0, 4.0}, 1.0);
  EXPECT_NEAR(c[0], 0.6, 1e-15);
  EXPECT_NEAR(c[1], 0.8, 1e-15);
}

TEST(ClipTest, NormNeverExceedsBound) {
  nn::Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<nn::Tensor> g = {nn::Tensor::Matrix(3, 4),
                                 nn::Tensor::Matrix(1, 5)};
    const double scale = std::exp(rng.Uniform(-5.0, 5.0));
    for (auto& t : g) rng.FillNormal(t.values(), scale);
    const double before = GlobalNorm(g);
    const double factor = ClipGradient(g, 1.0);
    EXPECT_LE(GlobalNorm(g), 1.0 + 1e-12);
    EXPECT_NEAR(GlobalNorm(g), std::min(before, 1.0), 1e-12);
    EXPECT_LE(factor, 1.0);
  }
}

TEST(NoisyAggregateTest, ZeroNoiseIsClippedMean) {
  std::vector<std::vector<nn::Tensor>> units = {
      {nn::Tensor::FromVector({1.0, 2.0})},
      {nn::Tensor::FromVector({3.0, -2.0})}};
  nn::Rng rng(0);
  auto out = NoisyAggregate(units, 1.0, 0.0, 2.0, rng);
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out->at(0).values()[0], 2.0);
  EXPECT_EQ(out->at(0).values()[1], 0.0);
  auto single = NoisyAggregate(std::span(units).first(1), 1.0, 0.0, 1.0, rng);
  EXPECT_EQ(single->at(0).values()[1], 2.0);
  EXPECT_FALSE(
      NoisyAggregate(std::span<const std::vector<nn::Tensor>>(), 1.0, 0.0,
                     1.0, rng)
          .ok());
}

TEST(NoisyAggregateTest, NoiseStandardDeviation) {
  const std::size_t batch = 128;
  std::vector<std::vector<nn::Tensor>> units(
      batch, {nn::Tensor::FromVector(std::vector<double>(1000, 0.0))});
  nn::Rng rng(7);
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto out = NoisyAggregate(units, 1.0, 1.1, batch, rng);
    ASSERT_TRUE(out.ok());
    for (double v : out->at(0).values()) {
      sum += v;
      sq += v * v;
      ++count;
    }
  }
  const double mean = sum / count;
  const double sd = std::sqrt(sq / count - mean * mean);
  EXPECT_NEAR(sd, 1.1 / 128, 0.05 * 1.1 / 128);
}

struct Fixture {
  nn::Dataset train;
  nn::Dataset test;
  model::NetSpec spec;
};

Fixture MakeFixture() {
  nn::Rng rng(11);
  Fixture f;
  f.train = *nn::MakeBlobs(96, 6, 2, 1.5, 1.0, rng);
  f.test = *nn::MakeBlobs(64, 6, 2, 1.5, 1.0, rng);
  f.spec.input_dim = 6;
  f.spec.num_blocks = 2;
  f.spec.batch_norm = false;
  return f;
}

void ExpectSameParameters(const model::ResidualNet& a,
                          const model::ResidualNet& b) {
  const auto pa = a.Parameters();
  const auto pb = b.Parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t t = 0; t < pa.size(); ++t) {
    const auto va = pa[t]->values();
    const auto vb = pb[t]->values();
    ASSERT_EQ(va.size(), vb.size());
    for (std::size_t i = 0; i < va.size(); ++i) ASSERT_EQ(va[i], vb[i]);
  }
}

TEST(DpSgdTrainTest, DisabledMechanismMatchesSgdBitForBit) {
  const Fixture f = MakeFixture();
  for (const auto& noise :
       {model::NoiseConfig::None(), model::NoiseConfig::Additive(0.3),
        model::NoiseConfig::Multiplicative(0.3, 0.1)}) {
    auto sgd_net = model::ResidualNet::Create(f.spec, noise, 3);
    auto dp_net = model::ResidualNet::Create(f.spec, noise, 3);
    ASSERT_TRUE(sgd_net.ok() && dp_net.ok());
    DpSgdConfig config;
    config.clip_norm = 1e9;
    config.noise_multiplier = 0.0;
    config.train.epochs = 3;
    config.train.batch_size = 16;
    config.train.optimizer.momentum = 0.9;
    config.train.seed = 5;
    auto sgd = model::Train(*sgd_net, f.train, &f.test, config.train);
    auto dp = DpSgdTrain(*dp_net, f.train, &f.test, config);
    ASSERT_TRUE(sgd.ok() && dp.ok()) << dp.status();
    ExpectSameParameters(*sgd_net, *dp_net);
    for (std::size_t e = 0; e < 3; ++e) {
      EXPECT_EQ(sgd->epochs[e].train_loss, dp->history.epochs[e].train_loss);
      EXPECT_EQ(sgd->epochs[e].test_accuracy,
                dp->history.epochs[e].test_accuracy);
    }
  }
}

TEST(DpSgdTrainTest, UpdateCount) {
  nn::Rng rng(1);
  auto data = nn::MakeBlobs(4, 3, 2, 1.0, 1.0, rng);
  model::NetSpec spec;
  spec.input_dim = 3;
  spec.batch_norm = false;
  auto net = model::ResidualNet::Create(spec, model::NoiseConfig::None(), 1);
  DpSgdConfig config;
  config.train.batch_size = 1;
  auto h = DpSgdTrain(*net, *data, nullptr, config);
  ASSERT_TRUE(h.ok());
  EXPECT_EQ(h->noisy_updates, 4);
  EXPECT_EQ(h->clipped_units, 4);
}

TEST(DpSgdTrainTest, PreNoiseAggregateBounded) {
  const Fixture f = MakeFixture();
  for (std::size_t micro : {1u, 4u}) {
    auto net = model::ResidualNet::Create(f.spec, model::NoiseConfig::None(),
                                          2);
    DpSgdConfig config;
    config.clip_norm = 0.05;
    config.microbatch_size = micro;
    config.train.batch_size = 16;
    config.train.epochs = 2;
    auto h = DpSgdTrain(*net, f.train, &f.test, config);
    ASSERT_TRUE(h.ok());
    EXPECT_LE(h->max_mean_clipped_norm, 0.05 * (1 + 1e-12));
    EXPECT_GT(h->max_mean_clipped_norm, 0.0);
    EXPECT_EQ(h->clipped_units, 2 * 96 / static_cast<int>(micro));
  }
}

TEST(DpSgdTrainTest, DeterministicPerSeed) {
  const Fixture f = MakeFixture();
  auto a = model::ResidualNet::Create(f.spec, model::NoiseConfig::None(), 2);
  auto b = model::ResidualNet::Create(f.spec, model::NoiseConfig::None(), 2);
  DpSgdConfig config;
  config.train.epochs = 2;
  config.train.batch_size = 8;
  config.train.seed = 9;
  ASSERT_TRUE(DpSgdTrain(*a, f.train, nullptr, config).ok());
  ASSERT_TRUE(DpSgdTrain(*b, f.train, nullptr, config).ok());
  ExpectSameParameters(*a, *b);
}

TEST(DpSgdTrainTest, RejectsBadInputs) {
  const Fixture f = MakeFixture();
  model::NetSpec with_bn = f.spec;
  with_bn.batch_norm = true;
  auto net = model::ResidualNet::Create(with_bn, model::NoiseConfig::None(), 1);
  DpSgdConfig config;
  EXPECT_FALSE(DpSgdTrain(*net, f.train, nullptr, config).ok());
  auto plain = model::ResidualNet::Create(f.spec, model::NoiseConfig::None(),
                                          1);
  config.clip_norm = 0.0;
  EXPECT_FALSE(DpSgdTrain(*plain, f.train, nullptr, config).ok());
  config.clip_norm = 1.0;
  config.microbatch_size = 3;
  config.train.batch_size = 8;
  EXPECT_FALSE(DpSgdTrain(*plain, f.train, nullptr, config).ok());
}

TEST(DpSgdTrainTest, DivergenceAborts) {
  const Fixture f = MakeFixture();
  auto net = model::ResidualNet::Create(f.spec, model::NoiseConfig::None(), 1);
  DpSgdConfig config;
  config.noise_multiplier = 1e300;
  config.train.optimizer.learning_rate = 1e300;
  config.train.epochs = 3;
  auto h = DpSgdTrain(*net, f.train, nullptr, config);
  EXPECT_EQ(h.status().code(), absl::StatusCode::kInternal);
}

}  // namespace
}  // namespace rp::dpsgd
