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

#include "residual_model/ensemble.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <thread>

#include "absl/status/status.h"
#include "nn_core/loss.h"

namespace rp::model {

inline constexpr std::uint64_t kEnsembleEvalStream = 7;

absl::StatusOr<EnsembleModel> EnsembleModel::Create(const NetSpec& spec,
                                                    const NoiseConfig& noise,
                                                    std::size_t k,
                                                    std::uint64_t master_seed) {
  if (k == 0) return absl::InvalidArgumentError("ensemble size must be >= 1");
  EnsembleModel ensemble;
  for (std::size_t i = 0; i < k; ++i) {
    auto net = ResidualNet::Create(spec, noise,
                                   nn::Rng::DeriveSeed(master_seed, i));
    if (!net.ok()) return net.status();
    ensemble.members.push_back(std::move(*net));
  }
  return ensemble;
}

absl::StatusOr<nn::Tensor> EnsemblePredict(EnsembleModel& ensemble,
                                           const nn::Tensor& x, nn::Rng& rng,
                                           nn::Mode mode) {
  if (ensemble.members.empty()) {
    return absl::InvalidArgumentError("empty ensemble");
  }
  nn::Tensor sum;
  for (ResidualNet& member : ensemble.members) {
    auto logits = member.Forward(x, mode, rng);
    if (!logits.ok()) return logits.status();
    if (sum.empty()) sum = nn::Tensor(logits->shape());
    for (std::size_t n = 0; n < logits->rows(); ++n) {
      const auto p = nn::Softmax(logits->row(n));
      auto row = sum.row(n);
      for (std::size_t j = 0; j < p.size(); ++j) row[j] += p[j];
    }
  }
  const double k = static_cast<double>(ensemble.members.size());
  for (double& v : sum.values()) v /= k;
  return sum;
}

absl::StatusOr<double> EnsembleAccuracy(EnsembleModel& ensemble,
                                        const nn::Dataset& data,
                                        nn::Rng& rng) {
  if (data.size() == 0) return absl::InvalidArgumentError("empty dataset");
  auto probs = EnsemblePredict(ensemble, data.features, rng);
  if (!probs.ok()) return probs.status();
  const auto predicted = PredictLabels(*probs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predicted[i] == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

absl::StatusOr<EnsembleHistory> TrainEnsemble(EnsembleModel& ensemble,
                                              const nn::Dataset& train,
                                              const nn::Dataset* test,
                                              const TrainConfig& config,
                                              int threads) {
  if (ensemble.members.empty()) {
    return absl::InvalidArgumentError("empty ensemble");
  }
  const auto started = std::chrono::steady_clock::now();
  const std::size_t k = ensemble.members.size();
  std::vector<absl::StatusOr<TrainHistory>> results(
      k, absl::UnknownError("not run"));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < k; i = next++) {
      TrainConfig member_config = config;
      member_config.seed = nn::Rng::DeriveSeed(config.seed, i);
      results[i] = Train(ensemble.members[i], train, test, member_config);
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, k);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  EnsembleHistory history;
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    history.members.push_back(std::move(*r));
  }
  nn::Rng eval_rng =
      nn::Rng(config.seed).Fork(kEnsembleEvalStream);
  auto train_acc = EnsembleAccuracy(ensemble, train, eval_rng);
  if (!train_acc.ok()) return train_acc.status();
  history.train_accuracy = *train_acc;
  if (test != nullptr && test->size() > 0) {
    auto test_acc = EnsembleAccuracy(ensemble, *test, eval_rng);
    if (!test_acc.ok()) return test_acc.status();
    history.test_accuracy = *test_acc;
  }
  history.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - started)
                        .count();
  return history;
}

}  // namespace rp::model
