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

#include "residual_model/noise.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace rp::model {
namespace {

TEST(ClipAwayFromZeroTest, Examples) {
  EXPECT_EQ(ClipAwayFromZero(std::vector<double>{0.5}, 0.1),
            std::vector<double>{0.5});
  EXPECT_EQ(ClipAwayFromZero(std::vector<double>{-0.05}, 0.1),
            std::vector<double>{-0.1});
  EXPECT_EQ(ClipAwayFromZero(std::vector<double>{0.0}, 0.1),
            std::vector<double>{0.1});
  EXPECT_EQ(ClipAwayFromZero(std::vector<double>{-0.0}, 0.1),
            std::vector<double>{0.1});
}

TEST(ClipAwayFromZeroTest, FloorSignAndIdempotence) {
  nn::Rng rng(17);
  std::vector<double> x(5000);
  rng.FillNormal(x, 0.2);
  for (double eta : {1e-3, 0.1, 0.5}) {
    const auto once = ClipAwayFromZero(x, eta);
    const auto twice = ClipAwayFromZero(once, eta);
    EXPECT_EQ(once, twice);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_GE(std::abs(once[i]), eta);
      EXPECT_EQ(x[i] < 0, once[i] < 0);
      if (std::abs(x[i]) >= eta) EXPECT_EQ(once[i], x[i]);
    }
  }
}

TEST(InputPerturbTest, ZeroPiIsIdentity) {
  nn::Rng rng(1);
  const nn::Tensor x = nn::Tensor::FromVector({1.0, -2.0, 3.5});
  EXPECT_EQ(InputPerturb(x, 0.0, rng), x);
}

TEST(InputPerturbTest, MomentsOfUnitNoise) {
  nn::Rng rng(2);
  const std::size_t draws = 100000;
  const nn::Tensor x = nn::Tensor::Matrix(draws, 2);
  const nn::Tensor y = InputPerturb(x, 1.0, rng);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t n = 0; n < draws; ++n) {
      mean += y.at(n, j);
      sq += y.at(n, j) * y.at(n, j);
    }
    mean /= draws;
    const double var = sq / draws - mean * mean;
    EXPECT_LT(std::abs(mean), 0.02);
    EXPECT_NEAR(var, 1.0, 0.05);
  }
}

TEST(InputPerturbTest, FixedSeedIsBitIdentical) {
  const nn::Tensor x = nn::Tensor::FromVector({0.25, 0.5});
  nn::Rng a(99), b(99);
  EXPECT_EQ(InputPerturb(x, 0.7, a), InputPerturb(x, 0.7, b));
}

TEST(NoiseConfigTest, Validation) {
  EXPECT_TRUE(NoiseConfig::None().Validate().ok());
  EXPECT_EQ(NoiseConfig::Additive(2.0).pi, 1.0);
  NoiseConfig bad_none{NoiseStrategy::kNone, 1.0, 0.0, 0.1};
  EXPECT_FALSE(bad_none.Validate().ok());
  EXPECT_FALSE(NoiseConfig::Multiplicative(1.0, 0.0, 0.0).Validate().ok());
  EXPECT_FALSE(NoiseConfig::Additive(-1.0).Validate().ok());
  EXPECT_TRUE(NoiseConfig::Multiplicative(1.0, 0.5).Validate().ok());
}

TEST(NoiseConfigTest, ParseNames) {
  EXPECT_EQ(*ParseNoiseStrategy("additive"), NoiseStrategy::kAdditive);
  EXPECT_EQ(*ParseNoiseStrategy("II"), NoiseStrategy::kMultiplicative);
  EXPECT_FALSE(ParseNoiseStrategy("gaussian").ok());
  for (auto s : {NoiseStrategy::kNone, NoiseStrategy::kAdditive,
                 NoiseStrategy::kMultiplicative}) {
    EXPECT_EQ(*ParseNoiseStrategy(NoiseStrategyName(s)), s);
  }
}

}  // namespace
}  // namespace rp::model
