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

#ifndef RP_RESIDUAL_MODEL_TRAIN_H_
#define RP_RESIDUAL_MODEL_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nn_core/dataset.h"
#include "nn_core/grad_check.h"
#include "nn_core/optimizer.h"
#include "nn_core/rng.h"
#include "residual_model/residual_net.h"

namespace rp::model {

// Divide the learning rate by `divisor` from epoch `epoch` (0-based) on.
struct LrStep {
  int epoch = 0;
  double divisor = 1.0;
};

struct TrainConfig {
  int epochs = 1;
  std::size_t batch_size = 32;
  nn::OptimizerConfig optimizer;
  std::vector<LrStep> lr_schedule;
  std::uint64_t seed = 0;
  // Evaluate train/test accuracy after every epoch (otherwise only after the
  // last one).
  bool eval_every_epoch = true;

  absl::Status Validate() const;
  double LearningRateAt(int epoch) const;
};

// Streams derived from TrainConfig::seed.
inline constexpr std::uint64_t kShuffleStream = 1;
inline constexpr std::uint64_t kNoiseStream = 2;
inline constexpr std::uint64_t kEvalStream = 3;

struct EpochStats {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  // Eval-mode accuracies (noise still active). Negative when not measured.
  double train_accuracy = -1.0;
  double test_accuracy = -1.0;

  double generalization_gap() const { return train_accuracy - test_accuracy; }
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::int64_t steps = 0;
  double seconds = 0.0;
};

// Eval-mode accuracy with noise drawn from `rng`.
absl::StatusOr<double> Accuracy(ResidualNet& net, const nn::Dataset& data,
                                nn::Rng& rng);

// Minibatch training of one network. `test` may be null. A non-finite loss
// aborts with kInternal and a message naming the epoch and step.
absl::StatusOr<TrainHistory> Train(ResidualNet& net, const nn::Dataset& train,
                                   const nn::Dataset* test,
                                   const TrainConfig& config);

// Mean cross-entropy of `net` on `batch` and its gradient, with all noise
// drawn from Rng(noise_seed).
struct LossAndGradients {
  double loss = 0.0;
  std::vector<nn::Tensor> grads;
};
absl::StatusOr<LossAndGradients> BatchLossAndGradients(
    ResidualNet& net, const nn::Dataset& batch, nn::Mode mode,
    std::uint64_t noise_seed);

// Finite-difference check of BatchLossAndGradients with the noise frozen at
// Rng(noise_seed).
absl::StatusOr<nn::GradCheckResult> NetworkGradientCheck(
    ResidualNet& net, const nn::Dataset& batch, nn::Mode mode,
    std::uint64_t noise_seed, int probes, nn::Rng& probe_rng);

}  // namespace rp::model

#endif  // RP_RESIDUAL_MODEL_TRAIN_H_
