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

#ifndef RP_MEMBERSHIP_ATTACK_ATTACK_MODEL_H_
#define RP_MEMBERSHIP_ATTACK_ATTACK_MODEL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nn_core/layers.h"
#include "nn_core/rng.h"
#include "nn_core/tensor.h"
#include "residual_model/ensemble.h"

namespace rp::attack {

// Top-k class probabilities (descending) and membership label.
struct FeatureRecord {
  std::vector<double> features;
  int label = 0;  // 1 = member
};

// Sorts `probabilities` descending and keeps the first k.
std::vector<double> TopK(std::span<const double> probabilities, std::size_t k);

// One seeded eval-mode query of `model` per row of `x`; returns the top-k
// features of the ensemble-averaged softmax.
absl::StatusOr<std::vector<std::vector<double>>> ExtractFeatures(
    model::EnsembleModel& model, const nn::Tensor& x, std::size_t k,
    nn::Rng& rng);

struct AttackConfig {
  std::size_t hidden = 64;
  int epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;  // Adam
};

// k -> hidden (ReLU) -> 2 softmax.
class AttackModel {
 public:
  static absl::StatusOr<AttackModel> Train(std::span<const FeatureRecord> data,
                                           const AttackConfig& config,
                                           nn::Rng& rng);

  // Probability that `features` came from a training member.
  double MembershipScore(std::span<const double> features) const;
  std::vector<double> Scores(
      std::span<const std::vector<double>> features) const;
  double train_accuracy() const { return train_accuracy_; }
  std::size_t input_dim() const { return hidden_.weight.cols(); }

 private:
  nn::LayerParams hidden_;
  nn::LayerParams relu_;
  nn::LayerParams output_;
  double train_accuracy_ = 0.0;
};

}  // namespace rp::attack

#endif  // RP_MEMBERSHIP_ATTACK_ATTACK_MODEL_H_
