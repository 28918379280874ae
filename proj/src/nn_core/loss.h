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

#ifndef RP_NN_CORE_LOSS_H_
#define RP_NN_CORE_LOSS_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace rp::nn {

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Numerically stable softmax (max-subtracted).
std::vector<double> Softmax(std::span<const double> logits);

// loss = -log softmax(logits)[label]; grad = softmax(logits) - onehot(label).
absl::StatusOr<LossAndGrad> SoftmaxCrossEntropy(std::span<const double> logits,
                                                int label);

}  // namespace rp::nn

#endif  // RP_NN_CORE_LOSS_H_
