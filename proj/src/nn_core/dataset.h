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

#ifndef RP_NN_CORE_DATASET_H_
#define RP_NN_CORE_DATASET_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "nn_core/tensor.h"

namespace rp::nn {

// Labeled examples: features is N x d, labels in [0, num_classes).
struct Dataset {
  Tensor features;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features.cols(); }

  static absl::StatusOr<Dataset> Create(Tensor features,
                                        std::vector<int> labels,
                                        int num_classes);

  Dataset Subset(std::span<const std::size_t> indices) const;
};

}  // namespace rp::nn

#endif  // RP_NN_CORE_DATASET_H_
