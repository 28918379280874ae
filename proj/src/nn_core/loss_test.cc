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

#include "nn_core/loss.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "gtest/gtest.h"
#include "nn_core/rng.h"

namespace rp::nn {
namespace {

TEST(LossTest, UniformLogits) {
  auto r = SoftmaxCrossEntropy(std::vector<double>{0, 0, 0, 0}, 0);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->loss, std::log(4.0), 1e-12);
  EXPECT_NEAR(r->loss, 1.386294, 1e-6);
}

TEST(LossTest, SaturatedLogits) {
  auto r = SoftmaxCrossEntropy(std::vector<double>{100, 0}, 0);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->loss, 0.0, 1e-40);
  EXPECT_GE(r->loss, 0.0);
}

TEST(LossTest, NanLogitsGiveNanLoss) {
  auto r = SoftmaxCrossEntropy(
      std::vector<double>{std::numeric_limits<double>::quiet_NaN(), 0}, 1);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(std::isnan(r->loss));
}

TEST(LossTest, LabelOutOfRange) {
  EXPECT_FALSE(SoftmaxCrossEntropy(std::vector<double>{1, 2}, 2).ok());
  EXPECT_FALSE(SoftmaxCrossEntropy(std::vector<double>{1, 2}, -1).ok());
  EXPECT_FALSE(SoftmaxCrossEntropy(std::vector<double>{1}, 0).ok());
}

TEST(LossTest, GradientMatchesCentralDifferences) {
  Rng rng(42);
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> z(2 + trial % 9);
    rng.FillNormal(z);
    const int label = static_cast<int>(rng.Index(z.size()));
    auto r = SoftmaxCrossEntropy(z, label);
    ASSERT_TRUE(r.ok());
    for (std::size_t k = 0; k < z.size(); ++k) {
      auto zp = z, zm = z;
      zp[k] += h;
      zm[k] -= h;
      const double numeric = (SoftmaxCrossEntropy(zp, label)->loss -
                              SoftmaxCrossEntropy(zm, label)->loss) /
                             (2 * h);
      const double denom =
          std::max({std::abs(numeric), std::abs(r->grad[k]), 1e-6});
      EXPECT_LT(std::abs(numeric - r->grad[k]) / denom, 1e-6);
    }
  }
}

TEST(LossTest, SoftmaxSumsToOneAndLossNonnegative) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> z(2 + trial % 17);
    rng.FillNormal(z, 50.0);
    const auto p = Softmax(z);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    EXPECT_GE(SoftmaxCrossEntropy(z, 0)->loss, 0.0);
  }
}

}  // namespace
}  // namespace rp::nn
