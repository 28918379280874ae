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

#include "sde_lab/image.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace rp::sde {

absl::StatusOr<ImageGrid> ImageGrid::Create(std::size_t rows, std::size_t cols,
                                            std::size_t channels,
                                            std::vector<double> pixels) {
  if (rows == 0 || cols == 0 || channels == 0) {
    return absl::InvalidArgumentError("image extents must be positive");
  }
  if (pixels.size() != rows * cols * channels) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", rows * cols * channels, " pixel values, got ",
        pixels.size()));
  }
  return ImageGrid{rows, cols, channels, std::move(pixels)};
}

ImageGrid ImageGrid::Filled(std::size_t rows, std::size_t cols,
                            std::size_t channels, double value) {
  return ImageGrid{rows, cols, channels,
                   std::vector<double>(rows * cols * channels, value)};
}

ImageGrid MakeTestPattern(std::size_t rows, std::size_t cols,
                          std::size_t channels) {
  ImageGrid img = ImageGrid::Filled(rows, cols, channels, 0.0);
  for (std::size_t k = 0; k < channels; ++k) {
    const double cx = 0.3 + 0.2 * static_cast<double>(k % 3);
    const double cy = 0.6 - 0.15 * static_cast<double>(k % 3);
    for (std::size_t i = 0; i < rows; ++i) {
      const double y = (static_cast<double>(i) + 0.5) / rows;
      for (std::size_t j = 0; j < cols; ++j) {
        const double x = (static_cast<double>(j) + 0.5) / cols;
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double bump = std::exp(-r2 / 0.02);
        const double ramp = 0.5 * x + 0.25 * y;
        img.at(i, j, k) = std::clamp(0.15 + 0.6 * bump + 0.25 * ramp, 0.0, 1.0);
      }
    }
  }
  return img;
}

std::string EncodePnm(const ImageGrid& image) {
  const char* magic = image.channels == 1 ? "P5" : "P6";
  std::string out =
      absl::StrCat(magic, "\n", image.cols, " ", image.rows, "\n255\n");
  const std::size_t out_channels = image.channels == 1 ? 1 : 3;
  out.reserve(out.size() + image.rows * image.cols * out_channels);
  for (std::size_t i = 0; i < image.rows; ++i) {
    for (std::size_t j = 0; j < image.cols; ++j) {
      for (std::size_t k = 0; k < out_channels; ++k) {
        const double v =
            image.at(i, j, std::min(k, image.channels - 1));
        const double clamped = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<char>(
            static_cast<unsigned char>(std::lround(clamped * 255.0))));
      }
    }
  }
  return out;
}

absl::Status WritePnm(const ImageGrid& image, const std::string& path) {
  if (image.channels != 1 && image.channels != 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("PNM export needs 1 or 3 channels, got ", image.channels));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << EncodePnm(image);
  if (!out.flush()) {
    return absl::UnavailableError(absl::StrCat("write failed: ", path));
  }
  return absl::OkStatus();
}

absl::StatusOr<ImageGrid> DecodePnm(const std::string& bytes) {
  std::size_t pos = 0;
  // Header tokens separated by whitespace; '#' starts a comment line.
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    return bytes.substr(start, pos - start);
  };
  const std::string magic = next_token();
  if (magic != "P5" && magic != "P6") {
    return absl::InvalidArgumentError("not a binary PGM/PPM file");
  }
  std::size_t cols = 0, rows = 0;
  int maxval = 0;
  try {
    cols = std::stoul(next_token());
    rows = std::stoul(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    return absl::InvalidArgumentError("malformed PNM header");
  }
  if (rows == 0 || cols == 0 || maxval <= 0 || maxval > 255) {
    return absl::InvalidArgumentError("unsupported PNM dimensions or maxval");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t channels = magic == "P5" ? 1 : 3;
  const std::size_t count = rows * cols * channels;
  if (bytes.size() < pos + count) {
    return absl::InvalidArgumentError("truncated PNM raster");
  }
  std::vector<double> pixels(count);
  for (std::size_t i = 0; i < count; ++i) {
    pixels[i] = static_cast<unsigned char>(bytes[pos + i]) /
                static_cast<double>(maxval);
  }
  return ImageGrid::Create(rows, cols, channels, std::move(pixels));
}

absl::StatusOr<ImageGrid> ReadPnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DecodePnm(buffer.str());
}

}  // namespace rp::sde
