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

#include "nn_core/optimizer.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace rp::nn {

absl::string_view OptimizerName(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

absl::StatusOr<OptimizerKind> ParseOptimizer(absl::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgdMomentum;
  if (name == "adam") return OptimizerKind::kAdam;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown optimizer '", name, "'"));
}

absl::Status OptimizerConfig::Validate() const {
  if (!(learning_rate > 0.0)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    return absl::InvalidArgumentError("momentum must lie in [0, 1)");
  }
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    return absl::InvalidArgumentError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) {
    return absl::InvalidArgumentError("Adam epsilon must be positive");
  }
  return absl::OkStatus();
}

OptimState OptimState::Create(const OptimizerConfig& config,
                              std::span<const Tensor* const> params) {
  OptimState state;
  state.config = config;
  state.learning_rate = config.learning_rate;
  for (const Tensor* p : params) {
    state.first_moment.emplace_back(p->shape());
    if (config.kind == OptimizerKind::kAdam) {
      state.second_moment.emplace_back(p->shape());
    }
  }
  return state;
}

absl::Status OptimizerStep(std::span<Tensor* const> params,
                           std::span<const Tensor> grads, OptimState* state) {
  if (params.size() != grads.size() ||
      params.size() != state->first_moment.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("optimizer got ", params.size(), " parameters, ",
                     grads.size(), " gradients and ",
                     state->first_moment.size(), " moment buffers"));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->SameShape(grads[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("gradient ", i, " has shape ", grads[i].ShapeString(),
                       ", parameter has ", params[i]->ShapeString()));
    }
    if (!grads[i].AllFinite()) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite gradient in parameter ", i));
    }
  }
  const double lr = state->learning_rate;
  ++state->step_count;
  if (state->config.kind == OptimizerKind::kSgdMomentum) {
    const double mu = state->config.momentum;
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto p = params[i]->values();
      auto v = state->first_moment[i].values();
      const auto g = grads[i].values();
      for (std::size_t j = 0; j < p.size(); ++j) {
        v[j] = mu * v[j] + g[j];
        p[j] -= lr * v[j];
      }
    }
    return absl::OkStatus();
  }
  const double b1 = state->config.beta1;
  const double b2 = state->config.beta2;
  const double t = static_cast<double>(state->step_count);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->values();
    auto m = state->first_moment[i].values();
    auto v = state->second_moment[i].values();
    const auto g = grads[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p[j] -= lr * m_hat / (std::sqrt(v_hat) + state->config.adam_epsilon);
    }
  }
  return absl::OkStatus();
}

}  // namespace rp::nn
