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

#include "experiment_harness/dataset_io.h"

#include <set>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace rp::harness {
namespace {

using ::testing::HasSubstr;

TEST(CsvTest, QuotingFollowsRfc4180) {
  auto rows = ParseCsv(
      "a,\"b,c\",\"say \"\"hi\"\"\"\r\n"
      "\"multi\nline\",,x\n");
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_EQ(rows->size(), 2u);
  EXPECT_EQ((*rows)[0],
            (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ((*rows)[1], (std::vector<std::string>{"multi\nline", "", "x"}));
}

TEST(CsvTest, UnterminatedQuoteReportsOffset) {
  auto rows = ParseCsv("a,b\n\"open,c\n");
  ASSERT_FALSE(rows.ok());
  EXPECT_THAT(rows.status().message(), HasSubstr("record 2"));
  EXPECT_THAT(rows.status().message(), HasSubstr("offset 4"));
}

TEST(CsvTest, RecordOffsets) {
  std::vector<std::size_t> offsets;
  ASSERT_TRUE(ParseCsv("x,y\n1,2\n30,4\n", &offsets).ok());
  EXPECT_EQ(offsets, (std::vector<std::size_t>{0, 4, 8}));
}

TEST(CsvDatasetTest, LoadsFeaturesAndLabels) {
  auto data = DatasetFromCsv("f0,label,f1\n1,0,2\n3,1,4\n5,2,6\n", true,
                             "label");
  ASSERT_TRUE(data.ok()) << data.status();
  EXPECT_EQ(data->size(), 3u);
  EXPECT_EQ(data->dim(), 2u);
  EXPECT_EQ(data->num_classes, 3);
  EXPECT_EQ(data->labels, (std::vector<int>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(data->features.at(2, 1), 6.0);
}

TEST(CsvDatasetTest, LastColumnIsDefaultLabel) {
  auto data = DatasetFromCsv("1.5,2.5,1\n0.5,0.25,0\n", false, "");
  ASSERT_TRUE(data.ok()) << data.status();
  EXPECT_EQ(data->labels, (std::vector<int>{1, 0}));
  EXPECT_DOUBLE_EQ(data->features.at(1, 1), 0.25);
}

TEST(CsvDatasetTest, RaggedRowNamesRowAndOffset) {
  // Row 3 counts the header as row 1.
  const std::string text = "a,b,y\n1,2,0\n3,1\n";
  auto data = DatasetFromCsv(text, true, "y");
  ASSERT_FALSE(data.ok());
  EXPECT_THAT(data.status().message(), HasSubstr("row 3"));
  EXPECT_THAT(data.status().message(), HasSubstr("byte offset 12"));
  EXPECT_THAT(data.status().message(), HasSubstr("expected 3 columns"));
}

TEST(CsvDatasetTest, NonNumericCellRejected) {
  auto data = DatasetFromCsv("a,y\nabc,0\n", true, "y");
  ASSERT_FALSE(data.ok());
  EXPECT_THAT(data.status().message(), HasSubstr("row 2"));
}

TEST(IdxTest, TenImageFixture) {
  std::vector<std::uint8_t> pixels(10 * 28 * 28);
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = i % 256;
  std::vector<std::uint8_t> labels = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  auto data = DatasetFromIdx(EncodeIdxImages(10, 28, 28, pixels),
                             EncodeIdxLabels(labels));
  ASSERT_TRUE(data.ok()) << data.status();
  EXPECT_EQ(data->size(), 10u);
  EXPECT_EQ(data->dim(), 784u);
  EXPECT_EQ(data->num_classes, 10);
  double lo = 1.0, hi = 0.0;
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t c = 0; c < 784; ++c) {
      lo = std::min(lo, data->features.at(r, c));
      hi = std::max(hi, data->features.at(r, c));
    }
  }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1.0);
  EXPECT_DOUBLE_EQ(data->features.at(0, 1), 1.0 / 255.0);
}

TEST(IdxTest, BadMagicAndTruncationRejected) {
  std::string images = EncodeIdxImages(2, 2, 2, std::vector<std::uint8_t>(8));
  std::string labels = EncodeIdxLabels({0, 1});
  EXPECT_FALSE(DatasetFromIdx(labels, labels).ok());
  auto truncated = DatasetFromIdx(images.substr(0, images.size() - 1), labels);
  ASSERT_FALSE(truncated.ok());
  EXPECT_THAT(truncated.status().message(), HasSubstr("offset"));
  EXPECT_FALSE(DatasetFromIdx(images, EncodeIdxLabels({0})).ok());
}

TEST(LoadDatasetTest, BlobsAreBalanced) {
  DatasetDescriptor d;
  d.source = DatasetSource::kBlobs;
  d.n = 200;
  d.dim = 2;
  auto data = LoadDataset(d, 7);
  ASSERT_TRUE(data.ok()) << data.status();
  EXPECT_EQ(data->size(), 200u);
  EXPECT_EQ(data->dim(), 2u);
  int ones = 0;
  for (int y : data->labels) ones += y;
  EXPECT_EQ(ones, 100);
}

TEST(LoadDatasetTest, DeterministicPerSeed) {
  DatasetDescriptor d;
  d.source = DatasetSource::kMoons;
  d.n = 50;
  auto a = LoadDataset(d, 9), b = LoadDataset(d, 9), c = LoadDataset(d, 10);
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  auto values = [](const nn::Dataset& d) {
    return std::vector<double>(d.features.values().begin(),
                               d.features.values().end());
  };
  EXPECT_EQ(values(*a), values(*b));
  EXPECT_NE(values(*a), values(*c));
}

TEST(LoadDatasetTest, SubsampleKeepsRequestedCount) {
  DatasetDescriptor d;
  d.n = 100;
  d.subsample = 30;
  auto data = LoadDataset(d, 1);
  ASSERT_TRUE(data.ok());
  EXPECT_EQ(data->size(), 30u);
}

TEST(LoadDatasetTest, MissingFileIsError) {
  DatasetDescriptor d;
  d.source = DatasetSource::kCsv;
  d.path = "/nonexistent/data.csv";
  EXPECT_FALSE(LoadDataset(d, 1).ok());
}

TEST(SplitTest, DisjointAndSized) {
  DatasetDescriptor d;
  d.n = 101;
  d.dim = 1;
  auto data = LoadDataset(d, 2);
  ASSERT_TRUE(data.ok());
  auto split = SplitTrainTest(*data, 0.3, 4);
  ASSERT_TRUE(split.ok());
  EXPECT_EQ(split->test.size(), 30u);
  EXPECT_EQ(split->train.size(), 71u);
  std::multiset<double> all, parts;
  for (std::size_t i = 0; i < data->size(); ++i) {
    all.insert(data->features.at(i, 0));
  }
  for (std::size_t i = 0; i < split->train.size(); ++i) {
    parts.insert(split->train.features.at(i, 0));
  }
  for (std::size_t i = 0; i < split->test.size(); ++i) {
    parts.insert(split->test.features.at(i, 0));
  }
  EXPECT_EQ(all, parts);
}

}  // namespace
}  // namespace rp::harness
