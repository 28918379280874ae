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

#ifndef RP_NN_CORE_TENSOR_H_
#define RP_NN_CORE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace rp::nn {

// Dense row-major array of doubles with shape metadata. Rank 1 holds vectors,
// rank 2 holds batches (rows are examples) and weight matrices.
class Tensor {
 public:
  Tensor() = default;

  // Zero- (or `fill`-) initialized tensor of the given shape. Every extent must
  // be positive.
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

  // Validating constructor: fails when product(shape) != data.size() or an
  // extent is zero.
  static absl::StatusOr<Tensor> Create(std::vector<std::size_t> shape,
                                       std::vector<double> data);

  static Tensor FromVector(std::vector<double> values);
  static Tensor Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_[axis]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Rank-2 accessors.
  std::size_t rows() const { return shape_[0]; }
  std::size_t cols() const { return shape_[1]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * shape_[1], shape_[1]};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * shape_[1], shape_[1]};
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  void Fill(double value);
  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }
  bool AllFinite() const;
  double Norm2() const;
  std::string ShapeString() const;

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Returns `a` laid out as a 1 x n batch.
Tensor AsBatch(std::span<const double> a);

double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> a);

}  // namespace rp::nn

#endif  // RP_NN_CORE_TENSOR_H_
