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

#include "nn_core/dataset.h"

#include <algorithm>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace rp::nn {

absl::StatusOr<Dataset> Dataset::Create(Tensor features,
                                        std::vector<int> labels,
                                        int num_classes) {
  if (features.rank() != 2) {
    return absl::InvalidArgumentError("features must be an N x d matrix");
  }
  if (features.rows() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature rows (", features.rows(),
                     ") and label count (", labels.size(), ") differ"));
  }
  if (num_classes < 1) {
    return absl::InvalidArgumentError("num_classes must be positive");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      return absl::OutOfRangeError(absl::StrCat(
          "label ", labels[i], " at row ", i, " outside [0, ", num_classes,
          ")"));
    }
  }
  Dataset ds;
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  ds.num_classes = num_classes;
  return ds;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.num_classes = num_classes;
  const std::size_t d = dim();
  out.features = Tensor::Matrix(std::max<std::size_t>(indices.size(), 1), d);
  if (indices.empty()) {
    out.features = Tensor();
    return out;
  }
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = features.row(indices[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels.push_back(labels[indices[r]]);
  }
  return out;
}

}  // namespace rp::nn
