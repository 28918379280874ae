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

#include "nn_core/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace rp::nn {
namespace {

std::size_t Product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(Product(shape_), fill) {}

absl::StatusOr<Tensor> Tensor::Create(std::vector<std::size_t> shape,
                                      std::vector<double> data) {
  for (std::size_t extent : shape) {
    if (extent == 0) {
      return absl::InvalidArgumentError("Tensor extents must be positive");
    }
  }
  if (Product(shape) != data.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Tensor shape [", absl::StrJoin(shape, ","),
                     "] does not match ", data.size(), " values"));
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::FromVector(std::vector<double> values) {
  Tensor t;
  t.shape_ = {values.size()};
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols, double fill) {
  return Tensor({rows, cols}, fill);
}

void Tensor::Fill(double value) {
  std::fill(data_.begin(), data_.end(), value);
}

bool Tensor::AllFinite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double Tensor::Norm2() const { return nn::Norm2(data_); }

std::string Tensor::ShapeString() const {
  return absl::StrCat("[", absl::StrJoin(shape_, ","), "]");
}

Tensor AsBatch(std::span<const double> a) {
  Tensor t = Tensor::Matrix(1, a.size());
  std::copy(a.begin(), a.end(), t.values().begin());
  return t;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm2(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

}  // namespace rp::nn
