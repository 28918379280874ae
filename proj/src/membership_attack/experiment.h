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

#ifndef RP_MEMBERSHIP_ATTACK_EXPERIMENT_H_
#define RP_MEMBERSHIP_ATTACK_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "absl/status/statusor.h"
#include "membership_attack/attack_model.h"
#include "membership_attack/metrics.h"
#include "membership_attack/split.h"
#include "nn_core/dataset.h"
#include "residual_model/ensemble.h"
#include "residual_model/train.h"

namespace rp::attack {

struct TargetConfig {
  model::NetSpec spec;
  model::NoiseConfig noise;
  std::size_t ensemble_size = 1;
  model::TrainConfig train;
};

// Trains `target` on `train` with `config` (seed already derived) and
// returns the training history. Lets callers swap in another trainer.
using TargetTrainer = std::function<absl::StatusOr<model::EnsembleHistory>(
    model::EnsembleModel& target, const nn::Dataset& train,
    const model::TrainConfig& config, int threads)>;

struct MembershipExperimentConfig {
  TargetConfig target;
  // The shadow model uses shadow.spec / shadow.train; its noise is ignored
  // (always noise-free) and it is a single network.
  TargetConfig shadow;
  AttackConfig attack;
  std::vector<double> thresholds = DefaultThresholds();
  bool stratified = true;
  // Top-k features; 0 picks 2 for binary tasks and 3 otherwise.
  std::size_t top_k = 0;
  int threads = 1;
  std::uint64_t seed = 0;
  // Defaults to model::TrainEnsemble when empty.
  TargetTrainer target_trainer;
};

struct UtilityRecord {
  double target_train_accuracy = 0.0;
  double target_test_accuracy = 0.0;
  double shadow_train_accuracy = 0.0;
  double shadow_test_accuracy = 0.0;
  double attack_train_accuracy = 0.0;
  double generalization_gap() const {
    return target_train_accuracy - target_test_accuracy;
  }
};

struct MembershipExperimentResult {
  DatasetSplit split;
  AttackReport report;
  // Attack scores of target members and non-members.
  std::vector<double> member_scores;
  std::vector<double> nonmember_scores;
  UtilityRecord utility;
  // Target training wall-clock per epoch, summed over members.
  double target_seconds_per_epoch = 0.0;
  double seconds = 0.0;
};

// Split -> shadow training -> attack training on shadow features -> target
// training -> attack evaluation on target_train (members) vs target_out.
// Target test accuracy is measured on `test` when given, else on
// target_out.
absl::StatusOr<MembershipExperimentResult> RunMembershipExperiment(
    const nn::Dataset& pool, const nn::Dataset* test,
    const MembershipExperimentConfig& config);

}  // namespace rp::attack

#endif  // RP_MEMBERSHIP_ATTACK_EXPERIMENT_H_
