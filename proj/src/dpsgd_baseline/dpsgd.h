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

#ifndef RP_DPSGD_BASELINE_DPSGD_H_
#define RP_DPSGD_BASELINE_DPSGD_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nn_core/dataset.h"
#include "nn_core/rng.h"
#include "nn_core/tensor.h"
#include "residual_model/residual_net.h"
#include "residual_model/train.h"

namespace rp::dpsgd {

// Stream of TrainConfig::seed used for the aggregate noise.
inline constexpr std::uint64_t kAggregateNoiseStream = 4;

struct DpSgdConfig {
  double clip_norm = 1.0;
  double noise_multiplier = 1.1;
  // Examples per clipped unit. Each microbatch's mean gradient is clipped.
  std::size_t microbatch_size = 1;
  // Epochs, batch size, optimizer, schedule and seed.
  model::TrainConfig train;

  absl::Status Validate() const;
};

// Euclidean norm over all tensors.
double GlobalNorm(std::span<const nn::Tensor> grads);

// Scales `grads` in place by min(1, clip_norm / norm). Returns the factor.
double ClipGradient(std::span<nn::Tensor> grads, double clip_norm);

// Flat-vector form of ClipGradient.
std::vector<double> ClipVector(std::span<const double> g, double clip_norm);

// Returns (sum of `clipped` + N(0, (sigma*C)^2 I)) / divisor. With sigma = 0
// no draws are taken. `clipped` must be nonempty.
absl::StatusOr<std::vector<nn::Tensor>> NoisyAggregate(
    std::span<const std::vector<nn::Tensor>> clipped, double clip_norm,
    double noise_multiplier, double divisor, nn::Rng& rng);

struct DpSgdHistory {
  model::TrainHistory history;
  // Number of noisy aggregates applied (one per optimizer step).
  std::int64_t noisy_updates = 0;
  // Number of clipped units summed over training.
  std::int64_t clipped_units = 0;
  // Largest pre-noise aggregate norm divided by the number of units.
  double max_mean_clipped_norm = 0.0;
  double seconds_per_epoch = 0.0;
};

// DPSGD training with exact per-example gradients. The forward noise,
// shuffling and evaluation streams match model::Train, so with
// noise_multiplier 0 and a huge clip_norm the parameter trajectory equals
// plain training bit for bit. Networks with batchnorm are rejected because
// batch statistics couple the examples.
absl::StatusOr<DpSgdHistory> DpSgdTrain(model::ResidualNet& net,
                                        const nn::Dataset& train,
                                        const nn::Dataset* test,
                                        const DpSgdConfig& config);

}  // namespace rp::dpsgd

#endif  // RP_DPSGD_BASELINE_DPSGD_H_
