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

#include "nn_core/synthetic.h"

#include <cmath>
#include <numbers>
#include <vector>

namespace rp::nn {

absl::StatusOr<Dataset> MakeBlobs(std::size_t n, std::size_t dim,
                                  int num_classes, double separation,
                                  double spread, Rng& rng) {
  if (n == 0 || dim == 0 || num_classes < 2) {
    return absl::InvalidArgumentError(
        "blobs need n >= 1, dim >= 1 and at least two classes");
  }
  std::vector<std::vector<double>> centers(num_classes,
                                           std::vector<double>(dim));
  for (auto& c : centers) {
    rng.FillNormal(c);
    const double norm = Norm2(c);
    for (double& v : c) v *= separation / norm;
  }
  Tensor x = Tensor::Matrix(n, dim);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % num_classes);
    labels[i] = label;
    auto row = x.row(i);
    for (std::size_t j = 0; j < dim; ++j) {
      row[j] = centers[label][j] + spread * rng.Normal();
    }
  }
  return Dataset::Create(std::move(x), std::move(labels), num_classes);
}

absl::StatusOr<Dataset> MakeMoons(std::size_t n, std::size_t dim,
                                  double jitter, Rng& rng) {
  if (n == 0 || dim < 2) {
    return absl::InvalidArgumentError("moons need n >= 1 and dim >= 2");
  }
  Tensor x = Tensor::Matrix(n, dim);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double t = std::numbers::pi * rng.Uniform();
    auto row = x.row(i);
    if (label == 0) {
      row[0] = std::cos(t);
      row[1] = std::sin(t);
    } else {
      row[0] = 1.0 - std::cos(t);
      row[1] = 0.5 - std::sin(t);
    }
    for (std::size_t j = 0; j < dim; ++j) row[j] += jitter * rng.Normal();
    labels[i] = label;
  }
  return Dataset::Create(std::move(x), std::move(labels), 2);
}

}  // namespace rp::nn
