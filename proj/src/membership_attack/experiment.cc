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

#include "membership_attack/experiment.h"

#include <chrono>
#include <utility>

namespace rp::attack {
namespace {

// Streams derived from the experiment seed.
enum Stream : std::uint64_t {
  kSplit = 1,
  kShadowInit,
  kShadowTrain,
  kShadowQuery,
  kAttackTrain,
  kTargetInit,
  kTargetTrain,
  kTargetQuery,
  kUtility,
};

std::uint64_t SeedFor(const MembershipExperimentConfig& c, Stream s) {
  return nn::Rng::DeriveSeed(c.seed, s);
}

absl::Status AppendRecords(model::EnsembleModel& model, const nn::Dataset& d,
                           int label, std::size_t k, nn::Rng& rng,
                           std::vector<FeatureRecord>* out) {
  auto features = ExtractFeatures(model, d.features, k, rng);
  if (!features.ok()) return features.status();
  for (auto& f : *features) out->push_back({std::move(f), label});
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<MembershipExperimentResult> RunMembershipExperiment(
    const nn::Dataset& pool, const nn::Dataset* test,
    const MembershipExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (pool.num_classes < 2) {
    return absl::InvalidArgumentError("membership experiment needs >= 2 classes");
  }
  const std::size_t k =
      config.top_k != 0 ? config.top_k : (pool.num_classes == 2 ? 2 : 3);
  MembershipExperimentResult result;

  nn::Rng split_rng(SeedFor(config, kSplit));
  auto split = config.stratified
                   ? SplitDatasetStratified(pool.labels, split_rng)
                   : SplitDataset(pool.size(), split_rng);
  if (!split.ok()) return split.status();
  result.split = std::move(*split);
  const nn::Dataset shadow_in = pool.Subset(result.split.shadow_train);
  const nn::Dataset shadow_out = pool.Subset(result.split.shadow_out);
  const nn::Dataset target_in = pool.Subset(result.split.target_train);
  const nn::Dataset target_out = pool.Subset(result.split.target_out);

  // Shadow: a single noise-free network.
  auto shadow = model::EnsembleModel::Create(
      config.shadow.spec, model::NoiseConfig::None(), 1,
      SeedFor(config, kShadowInit));
  if (!shadow.ok()) return shadow.status();
  model::TrainConfig shadow_train = config.shadow.train;
  shadow_train.seed = SeedFor(config, kShadowTrain);
  auto shadow_history = model::TrainEnsemble(*shadow, shadow_in, &shadow_out,
                                             shadow_train, config.threads);
  if (!shadow_history.ok()) return shadow_history.status();
  result.utility.shadow_train_accuracy = shadow_history->train_accuracy;
  result.utility.shadow_test_accuracy = shadow_history->test_accuracy;

  std::vector<FeatureRecord> records;
  nn::Rng shadow_query(SeedFor(config, kShadowQuery));
  if (auto s = AppendRecords(*shadow, shadow_in, 1, k, shadow_query, &records);
      !s.ok()) {
    return s;
  }
  if (auto s = AppendRecords(*shadow, shadow_out, 0, k, shadow_query, &records);
      !s.ok()) {
    return s;
  }
  nn::Rng attack_rng(SeedFor(config, kAttackTrain));
  auto attack = AttackModel::Train(records, config.attack, attack_rng);
  if (!attack.ok()) return attack.status();
  result.utility.attack_train_accuracy = attack->train_accuracy();

  // Target.
  auto target = model::EnsembleModel::Create(
      config.target.spec, config.target.noise, config.target.ensemble_size,
      SeedFor(config, kTargetInit));
  if (!target.ok()) return target.status();
  model::TrainConfig target_train = config.target.train;
  target_train.seed = SeedFor(config, kTargetTrain);
  target_train.eval_every_epoch = false;
  const nn::Dataset& utility_test =
      test != nullptr && test->size() > 0 ? *test : target_out;
  auto target_history =
      config.target_trainer
          ? config.target_trainer(*target, target_in, target_train,
                                  config.threads)
          : model::TrainEnsemble(*target, target_in, nullptr, target_train,
                                 config.threads);
  if (!target_history.ok()) return target_history.status();
  if (target_train.epochs > 0) {
    double seconds = 0.0;
    for (const auto& h : target_history->members) seconds += h.seconds;
    result.target_seconds_per_epoch = seconds / target_train.epochs;
  }
  nn::Rng utility_rng(SeedFor(config, kUtility));
  auto train_acc = model::EnsembleAccuracy(*target, target_in, utility_rng);
  if (!train_acc.ok()) return train_acc.status();
  auto test_acc = model::EnsembleAccuracy(*target, utility_test, utility_rng);
  if (!test_acc.ok()) return test_acc.status();
  result.utility.target_train_accuracy = *train_acc;
  result.utility.target_test_accuracy = *test_acc;

  nn::Rng target_query(SeedFor(config, kTargetQuery));
  auto member_features =
      ExtractFeatures(*target, target_in.features, k, target_query);
  if (!member_features.ok()) return member_features.status();
  auto outsider_features =
      ExtractFeatures(*target, target_out.features, k, target_query);
  if (!outsider_features.ok()) return outsider_features.status();
  const auto member_scores = attack->Scores(*member_features);
  const auto outsider_scores = attack->Scores(*outsider_features);
  auto report =
      BuildAttackReport(member_scores, outsider_scores, config.thresholds);
  if (!report.ok()) return report.status();
  result.report = std::move(*report);
  result.member_scores = member_scores;
  result.nonmember_scores = outsider_scores;
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return result;
}

}  // namespace rp::attack
