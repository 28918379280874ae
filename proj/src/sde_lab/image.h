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

#ifndef RP_SDE_LAB_IMAGE_H_
#define RP_SDE_LAB_IMAGE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace rp::sde {

// Row-major image with interleaved channels: pixel (i, j, k) lives at
// (i * cols + j) * channels + k. Values are nominally in [0, 1] but are not
// clamped until export.
struct ImageGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t channels = 0;
  std::vector<double> pixels;

  static absl::StatusOr<ImageGrid> Create(std::size_t rows, std::size_t cols,
                                          std::size_t channels,
                                          std::vector<double> pixels);
  static ImageGrid Filled(std::size_t rows, std::size_t cols,
                          std::size_t channels, double value);

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * cols + j) * channels + k;
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return pixels[index(i, j, k)];
  }
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return pixels[index(i, j, k)];
  }
  bool SameShape(const ImageGrid& other) const {
    return rows == other.rows && cols == other.cols &&
           channels == other.channels;
  }

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;
};

// Smooth deterministic test picture: overlapping radial bumps and ramps, one
// pattern per channel, values in [0, 1].
ImageGrid MakeTestPattern(std::size_t rows, std::size_t cols,
                          std::size_t channels);

// Binary PGM (P5, one channel) or PPM (P6, three channels), 8-bit, values
// clamped to [0, 1] and rounded.
absl::Status WritePnm(const ImageGrid& image, const std::string& path);
std::string EncodePnm(const ImageGrid& image);
// Reads P5/P6 with maxval < 256 into [0, 1].
absl::StatusOr<ImageGrid> ReadPnm(const std::string& path);
absl::StatusOr<ImageGrid> DecodePnm(const std::string& bytes);

}  // namespace rp::sde

#endif  // RP_SDE_LAB_IMAGE_H_
