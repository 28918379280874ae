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

#ifndef RP_EXPERIMENT_HARNESS_DATASET_IO_H_
#define RP_EXPERIMENT_HARNESS_DATASET_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "experiment_harness/config.h"
#include "nn_core/dataset.h"

namespace rp::harness {

// RFC 4180 records. Quoted fields may contain commas, quotes ("") and line
// breaks; CRLF and LF line ends are accepted. Errors cite the 1-based record
// number and byte offset. `record_offsets`, when given, receives the byte
// offset where each record starts.
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    absl::string_view text, std::vector<std::size_t>* record_offsets = nullptr);

// Numeric features plus an integer label column. Labels must be >= 0;
// num_classes is max label + 1.
absl::StatusOr<nn::Dataset> DatasetFromCsv(absl::string_view text,
                                           bool header,
                                           absl::string_view label_column);

// IDX (MNIST) unsigned-byte files: images with magic 0x00000803 and
// labels with magic 0x00000801. Pixels are scaled to [0, 1].
absl::StatusOr<nn::Dataset> DatasetFromIdx(absl::string_view images,
                                           absl::string_view labels);

// Big-endian IDX encoders for fixtures and exports.
std::string EncodeIdxImages(std::uint32_t count, std::uint32_t rows,
                            std::uint32_t cols,
                            const std::vector<std::uint8_t>& pixels);
std::string EncodeIdxLabels(const std::vector<std::uint8_t>& labels);

absl::StatusOr<std::string> ReadFile(const std::string& path);

// Builds the dataset the descriptor names; the seed drives synthetic
// generation and subsampling.
absl::StatusOr<nn::Dataset> LoadDataset(const DatasetDescriptor& descriptor,
                                        std::uint64_t seed);

// Seeded shuffle split into (train, test) with round(n * test_fraction)
// test examples.
struct TrainTestSplit {
  nn::Dataset train;
  nn::Dataset test;
};
absl::StatusOr<TrainTestSplit> SplitTrainTest(const nn::Dataset& data,
                                              double test_fraction,
                                              std::uint64_t seed);

}  // namespace rp::harness

#endif  // RP_EXPERIMENT_HARNESS_DATASET_IO_H_
