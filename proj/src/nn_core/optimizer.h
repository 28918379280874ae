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

#ifndef RP_NN_CORE_OPTIMIZER_H_
#define RP_NN_CORE_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nn_core/tensor.h"

namespace rp::nn {

enum class OptimizerKind { kSgdMomentum, kAdam };

absl::string_view OptimizerName(OptimizerKind kind);
absl::StatusOr<OptimizerKind> ParseOptimizer(absl::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgdMomentum;
  double learning_rate = 0.1;
  double momentum = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  absl::Status Validate() const;
};

// Optimizer state. `learning_rate` starts at config.learning_rate; schedules
// rewrite it between steps.
struct OptimState {
  OptimizerConfig config;
  double learning_rate = 0.0;
  std::int64_t step_count = 0;
  std::vector<Tensor> first_moment;   // SGD velocity or Adam m
  std::vector<Tensor> second_moment;  // Adam v

  static OptimState Create(const OptimizerConfig& config,
                           std::span<const Tensor* const> params);
};

// One update: SGD with momentum (v <- mu v + g, p <- p - lr v) or Adam with
// bias correction. A NaN/Inf gradient is rejected before anything changes.
absl::Status OptimizerStep(std::span<Tensor* const> params,
                           std::span<const Tensor> grads, OptimState* state);

}  // namespace rp::nn

#endif  // RP_NN_CORE_OPTIMIZER_H_
