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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "nn_core/rng.h"
#include "nn_core/synthetic.h"

namespace rp::harness {
namespace {

// Streams derived from the dataset seed.
constexpr std::uint64_t kGenerateStream = 1;
constexpr std::uint64_t kSubsampleStream = 2;

std::uint32_t ReadBigEndian(absl::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    v = (v << 8) | static_cast<std::uint8_t>(bytes[offset + i]);
  }
  return v;
}

void AppendBigEndian(std::uint32_t v, std::string* out) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out->push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

// Parses an IDX header; returns the dimension sizes.
absl::StatusOr<std::vector<std::uint32_t>> IdxHeader(absl::string_view bytes,
                                                     std::uint32_t magic,
                                                     absl::string_view what) {
  if (bytes.size() < 4) {
    return absl::InvalidArgumentError(absl::StrCat(
        what, ": truncated header at byte offset ", bytes.size()));
  }
  const std::uint32_t got = ReadBigEndian(bytes, 0);
  if (got != magic) {
    return absl::InvalidArgumentError(absl::StrCat(
        what, ": bad magic 0x", absl::Hex(got, absl::kZeroPad8),
        " at byte offset 0, expected 0x", absl::Hex(magic, absl::kZeroPad8)));
  }
  const std::size_t dims = magic & 0xff;
  std::vector<std::uint32_t> sizes;
  for (std::size_t i = 0; i < dims; ++i) {
    const std::size_t offset = 4 + 4 * i;
    if (bytes.size() < offset + 4) {
      return absl::InvalidArgumentError(absl::StrCat(
          what, ": truncated header at byte offset ", bytes.size()));
    }
    sizes.push_back(ReadBigEndian(bytes, offset));
  }
  std::uint64_t payload = 1;
  for (std::uint32_t s : sizes) payload *= s;
  const std::size_t start = 4 + 4 * dims;
  if (bytes.size() - start != payload) {
    return absl::InvalidArgumentError(absl::StrCat(
        what, ": expected ", payload, " data bytes from byte offset ", start,
        ", found ", bytes.size() - start));
  }
  return sizes;
}

absl::StatusOr<nn::Dataset> TwoClassBlobs(const DatasetDescriptor& d,
                                          nn::Rng& rng) {
  const std::size_t ones = static_cast<std::size_t>(
      std::llround(d.class_balance * static_cast<double>(d.n)));
  const std::size_t zeros = d.n - ones;
  // Draw enough cycling-label points and keep the first of each class.
  auto pool = nn::MakeBlobs(2 * std::max(ones, zeros), d.dim, 2, d.separation,
                            d.spread, rng);
  if (!pool.ok()) return pool.status();
  std::vector<std::size_t> keep;
  std::size_t have_ones = 0, have_zeros = 0;
  for (std::size_t i = 0; i < pool->size(); ++i) {
    if (pool->labels[i] == 1 && have_ones < ones) {
      keep.push_back(i);
      ++have_ones;
    } else if (pool->labels[i] == 0 && have_zeros < zeros) {
      keep.push_back(i);
      ++have_zeros;
    }
  }
  return pool->Subset(keep);
}

}  // namespace

absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    absl::string_view text, std::vector<std::size_t>* record_offsets) {
  std::vector<std::size_t> offsets;
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t record_start = 0;
  auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&]() {
    end_field();
    offsets.push_back(record_start);
    records.push_back(std::move(record));
    record.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        if (i < text.size() && text[i] != ',' && text[i] != '\n' &&
            text[i] != '\r') {
          return absl::InvalidArgumentError(absl::StrCat(
              "record ", records.size() + 1,
              ": unexpected character after closing quote at byte offset ",
              i));
        }
        continue;
      }
      field.push_back(ch);
      ++i;
      continue;
    }
    if (ch == '"') {
      if (!field.empty() || field_was_quoted) {
        return absl::InvalidArgumentError(
            absl::StrCat("record ", records.size() + 1,
                         ": stray quote at byte offset ", i));
      }
      in_quotes = true;
      field_was_quoted = true;
      ++i;
    } else if (ch == ',') {
      end_field();
      ++i;
    } else if (ch == '\r' || ch == '\n') {
      end_record();
      i += (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
      record_start = i;
    } else {
      field.push_back(ch);
      ++i;
    }
  }
  if (in_quotes) {
    return absl::InvalidArgumentError(
        absl::StrCat("record ", records.size() + 1,
                     ": unterminated quote starting in record at byte offset ",
                     record_start));
  }
  if (!field.empty() || !record.empty() || field_was_quoted) end_record();
  if (record_offsets != nullptr) *record_offsets = std::move(offsets);
  return records;
}

absl::StatusOr<nn::Dataset> DatasetFromCsv(absl::string_view text,
                                           bool header,
                                           absl::string_view label_column) {
  std::vector<std::size_t> offsets;
  auto records = ParseCsv(text, &offsets);
  if (!records.ok()) return records.status();
  if (records->empty()) return absl::InvalidArgumentError("empty CSV");
  const std::size_t width = records->front().size();
  if (width < 2) {
    return absl::InvalidArgumentError("CSV needs a label and >= 1 feature");
  }
  std::size_t label = width - 1;
  if (!label_column.empty()) {
    bool found = false;
    if (header) {
      const auto& names = records->front();
      for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == label_column) {
          label = c;
          found = true;
        }
      }
    }
    if (!found) {
      if (!absl::SimpleAtoi(label_column, &label) || label >= width) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown label column '", label_column, "'"));
      }
    }
  }
  const std::size_t first = header ? 1 : 0;
  const std::size_t n = records->size() - first;
  if (n == 0) return absl::InvalidArgumentError("CSV has no data rows");
  nn::Tensor features = nn::Tensor::Matrix(n, width - 1);
  std::vector<int> labels(n);
  int max_label = 0;
  for (std::size_t r = first; r < records->size(); ++r) {
    const auto& rec = (*records)[r];
    if (rec.size() != width) {
      return absl::InvalidArgumentError(
          absl::StrCat("CSV row ", r + 1, " (byte offset ", offsets[r],
                       "): expected ", width, " columns, found ", rec.size()));
    }
    auto out = features.row(r - first);
    std::size_t col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label) {
        int y;
        if (!absl::SimpleAtoi(rec[c], &y) || y < 0) {
          return absl::InvalidArgumentError(absl::StrCat(
              "CSV row ", r + 1, ": label '", rec[c],
              "' is not a non-negative integer"));
        }
        labels[r - first] = y;
        max_label = std::max(max_label, y);
      } else {
        if (!absl::SimpleAtod(rec[c], &out[col])) {
          return absl::InvalidArgumentError(
              absl::StrCat("CSV row ", r + 1, ", column ", c + 1, ": '",
                           rec[c], "' is not a number"));
        }
        ++col;
      }
    }
  }
  return nn::Dataset::Create(std::move(features), std::move(labels),
                             std::max(2, max_label + 1));
}

absl::StatusOr<nn::Dataset> DatasetFromIdx(absl::string_view images,
                                           absl::string_view labels) {
  auto image_dims = IdxHeader(images, 0x00000803, "IDX images");
  if (!image_dims.ok()) return image_dims.status();
  auto label_dims = IdxHeader(labels, 0x00000801, "IDX labels");
  if (!label_dims.ok()) return label_dims.status();
  const std::size_t count = (*image_dims)[0];
  if ((*label_dims)[0] != count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "IDX: ", count, " images but ", (*label_dims)[0], " labels"));
  }
  const std::size_t pixels = std::size_t{(*image_dims)[1]} * (*image_dims)[2];
  if (count == 0 || pixels == 0) {
    return absl::InvalidArgumentError("IDX: empty image set");
  }
  nn::Tensor features = nn::Tensor::Matrix(count, pixels);
  auto values = features.values();
  const std::size_t image_start = 16;
  for (std::size_t i = 0; i < count * pixels; ++i) {
    values[i] = static_cast<std::uint8_t>(images[image_start + i]) / 255.0;
  }
  std::vector<int> y(count);
  int max_label = 0;
  for (std::size_t i = 0; i < count; ++i) {
    y[i] = static_cast<std::uint8_t>(labels[8 + i]);
    max_label = std::max(max_label, y[i]);
  }
  return nn::Dataset::Create(std::move(features), std::move(y),
                             std::max(2, max_label + 1));
}

std::string EncodeIdxImages(std::uint32_t count, std::uint32_t rows,
                            std::uint32_t cols,
                            const std::vector<std::uint8_t>& pixels) {
  std::string out;
  AppendBigEndian(0x00000803, &out);
  AppendBigEndian(count, &out);
  AppendBigEndian(rows, &out);
  AppendBigEndian(cols, &out);
  out.append(pixels.begin(), pixels.end());
  return out;
}

std::string EncodeIdxLabels(const std::vector<std::uint8_t>& labels) {
  std::string out;
  AppendBigEndian(0x00000801, &out);
  AppendBigEndian(static_cast<std::uint32_t>(labels.size()), &out);
  out.append(labels.begin(), labels.end());
  return out;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::StatusOr<nn::Dataset> LoadDataset(const DatasetDescriptor& d,
                                        std::uint64_t seed) {
  nn::Rng root(seed);
  nn::Rng gen = root.Fork(kGenerateStream);
  absl::StatusOr<nn::Dataset> data;
  switch (d.source) {
    case DatasetSource::kBlobs:
      if (d.classes == 2 && d.class_balance != 0.5) {
        data = TwoClassBlobs(d, gen);
      } else {
        data = nn::MakeBlobs(d.n, d.dim, d.classes, d.separation, d.spread,
                             gen);
      }
      break;
    case DatasetSource::kMoons:
      data = nn::MakeMoons(d.n, d.dim, d.jitter, gen);
      break;
    case DatasetSource::kCsv: {
      auto text = ReadFile(d.path);
      if (!text.ok()) return text.status();
      data = DatasetFromCsv(*text, d.csv_header, d.label_column);
      break;
    }
    case DatasetSource::kIdx: {
      auto images = ReadFile(d.idx_images);
      if (!images.ok()) return images.status();
      auto labels = ReadFile(d.idx_labels);
      if (!labels.ok()) return labels.status();
      data = DatasetFromIdx(*images, *labels);
      break;
    }
  }
  if (!data.ok()) return data.status();
  if (d.subsample > 0 && d.subsample < data->size()) {
    std::vector<std::size_t> order(data->size());
    std::iota(order.begin(), order.end(), 0);
    nn::Rng sub = root.Fork(kSubsampleStream);
    sub.Shuffle(std::span<std::size_t>(order));
    order.resize(d.subsample);
    std::sort(order.begin(), order.end());
    return data->Subset(order);
  }
  return data;
}

absl::StatusOr<TrainTestSplit> SplitTrainTest(const nn::Dataset& data,
                                              double test_fraction,
                                              std::uint64_t seed) {
  const std::size_t n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(data.size())));
  if (n_test == 0 || n_test >= data.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot split ", data.size(), " examples with test "
                     "fraction ", test_fraction));
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  nn::Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(order));
  TrainTestSplit out;
  out.test = data.Subset(std::span(order).first(n_test));
  out.train = data.Subset(std::span(order).subspan(n_test));
  return out;
}

}  // namespace rp::harness
