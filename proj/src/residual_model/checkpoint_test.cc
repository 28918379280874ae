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

#include "residual_model/checkpoint.h"

#include <filesystem>

#include "gtest/gtest.h"

namespace rp::model {
namespace {

Checkpoint Sample() {
  NetSpec spec;
  spec.input_dim = 4;
  spec.num_blocks = 2;
  spec.num_outputs = 3;
  spec.layer = BlockLayer::kCirculant;
  spec.block_bias = true;
  spec.head_norm_bound = 1.5;
  Checkpoint c;
  c.master_seed = 0xfeedbeefcafe1234ULL;
  c.ensemble = *EnsembleModel::Create(
      spec, NoiseConfig::Multiplicative(0.3, 0.1, 0.05), 2, 42);
  c.ensemble.members[0].blocks()[0].batch_norm->bn_running_var[1] = 1.0 / 3;
  return c;
}

TEST(CheckpointTest, TextRoundTripIsExact) {
  const Checkpoint c = Sample();
  const std::string text = SerializeCheckpoint(c);
  auto parsed = ParseCheckpoint(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(parsed->master_seed, c.master_seed);
  ASSERT_EQ(parsed->ensemble.size(), 2u);
  EXPECT_EQ(SerializeCheckpoint(*parsed), text);
  const ResidualNet& a = c.ensemble.members[0];
  const ResidualNet& b = parsed->ensemble.members[0];
  EXPECT_EQ(b.noise().eta, 0.05);
  EXPECT_EQ(b.spec().layer, BlockLayer::kCirculant);
  auto pa = a.Parameters();
  auto pb = b.Parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(*pa[i], *pb[i]);
  EXPECT_EQ(b.blocks()[0].batch_norm->bn_running_var[1], 1.0 / 3);
}

TEST(CheckpointTest, FileRoundTrip) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "rp_ckpt_test.txt").string();
  const Checkpoint c = Sample();
  ASSERT_TRUE(SaveCheckpoint(c, path).ok());
  auto loaded = LoadCheckpoint(path);
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  EXPECT_EQ(SerializeCheckpoint(*loaded), SerializeCheckpoint(c));
  std::filesystem::remove(path);
  EXPECT_EQ(LoadCheckpoint(path).status().code(), absl::StatusCode::kNotFound);
}

TEST(CheckpointTest, CorruptInputIsRejected) {
  std::string text = SerializeCheckpoint(Sample());
  EXPECT_FALSE(ParseCheckpoint("hello\n").ok());
  EXPECT_FALSE(ParseCheckpoint(text.substr(0, text.size() / 2)).ok());
  const auto pos = text.find("head.weight 2 3 4 ");
  ASSERT_NE(pos, std::string::npos);
  std::string bad = text;
  bad.replace(pos, 18, "head.weight 2 3 5 ");
  EXPECT_EQ(ParseCheckpoint(bad).status().code(), absl::StatusCode::kDataLoss);
}

}  // namespace
}  // namespace rp::model
