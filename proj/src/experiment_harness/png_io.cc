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

#include "experiment_harness/png_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <png.h>
#include <vector>

#include "absl/status/status.h"

namespace rp::harness {
namespace {

void AppendBytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void Flush(png_structp) {}

struct ReadCursor {
  const std::string* bytes;
  std::size_t offset;
};

void ReadBytes(png_structp png, png_bytep data, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->bytes->size()) {
    png_error(png, "truncated PNG");
  }
  std::memcpy(data, cursor->bytes->data() + cursor->offset, length);
  cursor->offset += length;
}

}  // namespace

absl::StatusOr<std::string> EncodePng(const sde::ImageGrid& image) {
  if (image.channels != 1 && image.channels != 3) {
    return absl::InvalidArgumentError("PNG needs 1 or 3 channels");
  }
  if (image.rows == 0 || image.cols == 0) {
    return absl::InvalidArgumentError("empty image");
  }
  std::vector<png_byte> pixels(image.pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double v = image.pixels[i];
    const double clamped = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    pixels[i] = static_cast<png_byte>(std::lround(clamped * 255.0));
  }
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return absl::InternalError("png_create_write_struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return absl::InternalError("png_create_info_struct");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return absl::InternalError("libpng write failed");
  }
  png_set_write_fn(png, &out, AppendBytes, Flush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols),
               static_cast<png_uint_32>(image.rows), 8,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = image.cols * image.channels;
  for (std::size_t r = 0; r < image.rows; ++r) {
    png_write_row(png, pixels.data() + r * stride);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

absl::StatusOr<sde::ImageGrid> DecodePng(const std::string& bytes) {
  if (bytes.size() < 8 ||
      png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    return absl::InvalidArgumentError("not a PNG file");
  }
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return absl::InternalError("png_create_read_struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return absl::InternalError("png_create_info_struct");
  }
  ReadCursor cursor{&bytes, 0};
  sde::ImageGrid image;
  std::vector<png_byte> row;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return absl::InvalidArgumentError("malformed PNG");
  }
  png_set_read_fn(png, &cursor, ReadBytes);
  png_read_info(png, info);
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth != 8 ||
      (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    return absl::InvalidArgumentError("only 8-bit gray or RGB PNG supported");
  }
  image.rows = png_get_image_height(png, info);
  image.cols = png_get_image_width(png, info);
  image.channels = color == PNG_COLOR_TYPE_GRAY ? 1 : 3;
  image.pixels.resize(image.rows * image.cols * image.channels);
  row.resize(image.cols * image.channels);
  for (std::size_t r = 0; r < image.rows; ++r) {
    png_read_row(png, row.data(), nullptr);
    for (std::size_t i = 0; i < row.size(); ++i) {
      image.pixels[r * row.size() + i] = row[i] / 255.0;
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

}  // namespace rp::harness
