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

#ifndef RP_RESIDUAL_MODEL_ENSEMBLE_H_
#define RP_RESIDUAL_MODEL_ENSEMBLE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "nn_core/dataset.h"
#include "nn_core/rng.h"
#include "nn_core/tensor.h"
#include "residual_model/residual_net.h"
#include "residual_model/train.h"

namespace rp::model {

// k independently initialized and trained copies of one architecture.
struct EnsembleModel {
  std::vector<ResidualNet> members;

  // Member i is initialized from Rng::DeriveSeed(master_seed, i).
  static absl::StatusOr<EnsembleModel> Create(const NetSpec& spec,
                                              const NoiseConfig& noise,
                                              std::size_t k,
                                              std::uint64_t master_seed);

  std::size_t size() const { return members.size(); }
};

// Mean of the members' softmax outputs (N x K); member noise is drawn from
// `rng` in member order.
absl::StatusOr<nn::Tensor> EnsemblePredict(EnsembleModel& ensemble,
                                           const nn::Tensor& x, nn::Rng& rng,
                                           nn::Mode mode = nn::Mode::kEval);

// Eval-mode accuracy of the ensemble average.
absl::StatusOr<double> EnsembleAccuracy(EnsembleModel& ensemble,
                                        const nn::Dataset& data, nn::Rng& rng);

struct EnsembleHistory {
  std::vector<TrainHistory> members;
  double train_accuracy = 0.0;
  double test_accuracy = -1.0;
  double seconds = 0.0;
};

// Trains member i with seed Rng::DeriveSeed(config.seed, i). Members run on
// up to `threads` worker threads; results do not depend on `threads`.
absl::StatusOr<EnsembleHistory> TrainEnsemble(EnsembleModel& ensemble,
                                              const nn::Dataset& train,
                                              const nn::Dataset* test,
                                              const TrainConfig& config,
                                              int threads = 1);

}  // namespace rp::model

#endif  // RP_RESIDUAL_MODEL_ENSEMBLE_H_
