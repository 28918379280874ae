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

#include "nn_core/loss.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace rp::nn {

std::vector<double> Softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - peak);
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

absl::StatusOr<LossAndGrad> SoftmaxCrossEntropy(std::span<const double> logits,
                                                int label) {
  if (logits.size() < 2) {
    return absl::InvalidArgumentError("cross entropy needs at least 2 classes");
  }
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    return absl::OutOfRangeError(absl::StrCat("label ", label,
                                              " outside [0, ", logits.size(),
                                              ")"));
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - peak);
  const double log_norm = peak + std::log(total);
  LossAndGrad out;
  const double raw = log_norm - logits[label];
  // Clamp rounding below zero but let NaN through.
  out.loss = raw < 0.0 ? 0.0 : raw;
  out.grad.resize(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out.grad[k] = std::exp(logits[k] - log_norm);
  }
  out.grad[label] -= 1.0;
  return out;
}

}  // namespace rp::nn
