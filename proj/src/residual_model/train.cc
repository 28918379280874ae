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

#include "residual_model/train.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>

#include "absl/strings/str_cat.h"
#include "nn_core/loss.h"

namespace rp::model {
namespace {

constexpr std::size_t kEvalBatch = 256;

nn::Tensor GatherRows(const nn::Tensor& x, std::span<const std::size_t> rows) {
  nn::Tensor out = nn::Tensor::Matrix(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = x.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

absl::Status TrainConfig::Validate() const {
  if (epochs < 0) return absl::InvalidArgumentError("epochs must be >= 0");
  if (batch_size == 0) {
    return absl::InvalidArgumentError("batch_size must be >= 1");
  }
  for (const LrStep& step : lr_schedule) {
    if (!(step.divisor > 0.0)) {
      return absl::InvalidArgumentError("lr divisors must be positive");
    }
  }
  return optimizer.Validate();
}

double TrainConfig::LearningRateAt(int epoch) const {
  double lr = optimizer.learning_rate;
  for (const LrStep& step : lr_schedule) {
    if (epoch >= step.epoch) lr /= step.divisor;
  }
  return lr;
}

absl::StatusOr<double> Accuracy(ResidualNet& net, const nn::Dataset& data,
                                nn::Rng& rng) {
  if (data.size() == 0) return absl::InvalidArgumentError("empty dataset");
  std::size_t correct = 0;
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < data.size(); start += kEvalBatch) {
    const std::size_t end = std::min(data.size(), start + kEvalBatch);
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), start);
    auto logits = net.Forward(GatherRows(data.features, rows), nn::Mode::kEval,
                              rng);
    if (!logits.ok()) return logits.status();
    const auto predicted = PredictLabels(*logits);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (predicted[i] == data.labels[rows[i]]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

absl::StatusOr<TrainHistory> Train(ResidualNet& net, const nn::Dataset& train,
                                   const nn::Dataset* test,
                                   const TrainConfig& config) {
  if (auto s = config.Validate(); !s.ok()) return s;
  if (train.size() == 0) return absl::InvalidArgumentError("empty train set");
  if (train.dim() != net.spec().input_dim ||
      (test != nullptr && test->size() > 0 &&
       test->dim() != net.spec().input_dim)) {
    return absl::InvalidArgumentError("dataset width does not match network");
  }
  if (train.num_classes > static_cast<int>(net.spec().num_outputs) ||
      net.spec().num_outputs < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("network has ", net.spec().num_outputs,
                     " outputs for ", train.num_classes, " classes"));
  }
  const auto started = std::chrono::steady_clock::now();
  nn::Rng root(config.seed);
  nn::Rng shuffle_rng = root.Fork(kShuffleStream);
  nn::Rng noise_rng = root.Fork(kNoiseStream);
  nn::Rng eval_rng = root.Fork(kEvalStream);

  auto params = net.Parameters();
  std::vector<const nn::Tensor*> const_params(params.begin(), params.end());
  nn::OptimState state = nn::OptimState::Create(config.optimizer, const_params);

  TrainHistory history;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k = net.spec().num_outputs;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    state.learning_rate = config.LearningRateAt(epoch);
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> rows(order.data() + start,
                                              end - start);
      ResidualNet::ForwardCache cache;
      auto logits = net.Forward(GatherRows(train.features, rows),
                                nn::Mode::kTrain, noise_rng, &cache);
      if (!logits.ok()) return logits.status();
      nn::Tensor grad_logits = nn::Tensor::Matrix(rows.size(), k);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        auto lg = nn::SoftmaxCrossEntropy(logits->row(i),
                                          train.labels[rows[i]]);
        if (!lg.ok()) return lg.status();
        if (!std::isfinite(lg->loss)) {
          return absl::InternalError(absl::StrCat(
              "training diverged: non-finite loss at epoch ", epoch,
              ", step ", history.steps));
        }
        loss_sum += lg->loss;
        std::copy(lg->grad.begin(), lg->grad.end(),
                  grad_logits.row(i).begin());
      }
      auto grads = net.ZeroGradients();
      if (auto s = net.Backward(cache, grad_logits, &grads); !s.ok()) return s;
      const double b = static_cast<double>(rows.size());
      for (nn::Tensor& g : grads) {
        for (double& v : g.values()) v /= b;
      }
      if (auto s = nn::OptimizerStep(params, grads, &state); !s.ok()) {
        return absl::InternalError(absl::StrCat(
            "training diverged at epoch ", epoch, ", step ", history.steps,
            ": ", s.message()));
      }
      net.ProjectHead();
      ++history.steps;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = state.learning_rate;
    stats.train_loss = loss_sum / static_cast<double>(train.size());
    if (config.eval_every_epoch || epoch + 1 == config.epochs) {
      auto train_acc = Accuracy(net, train, eval_rng);
      if (!train_acc.ok()) return train_acc.status();
      stats.train_accuracy = *train_acc;
      if (test != nullptr && test->size() > 0) {
        auto test_acc = Accuracy(net, *test, eval_rng);
        if (!test_acc.ok()) return test_acc.status();
        stats.test_accuracy = *test_acc;
      }
    }
    history.epochs.push_back(stats);
  }
  history.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - started)
                        .count();
  return history;
}

absl::StatusOr<LossAndGradients> BatchLossAndGradients(
    ResidualNet& net, const nn::Dataset& batch, nn::Mode mode,
    std::uint64_t noise_seed) {
  if (batch.size() == 0) return absl::InvalidArgumentError("empty batch");
  nn::Rng rng(noise_seed);
  ResidualNet::ForwardCache cache;
  auto logits = net.Forward(batch.features, mode, rng, &cache);
  if (!logits.ok()) return logits.status();
  LossAndGradients out;
  nn::Tensor grad_logits(logits->shape());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto lg = nn::SoftmaxCrossEntropy(logits->row(i), batch.labels[i]);
    if (!lg.ok()) return lg.status();
    out.loss += lg->loss;
    std::copy(lg->grad.begin(), lg->grad.end(), grad_logits.row(i).begin());
  }
  out.grads = net.ZeroGradients();
  if (auto s = net.Backward(cache, grad_logits, &out.grads); !s.ok()) return s;
  const double n = static_cast<double>(batch.size());
  out.loss /= n;
  for (nn::Tensor& g : out.grads) {
    for (double& v : g.values()) v /= n;
  }
  return out;
}

absl::StatusOr<nn::GradCheckResult> NetworkGradientCheck(
    ResidualNet& net, const nn::Dataset& batch, nn::Mode mode,
    std::uint64_t noise_seed, int probes, nn::Rng& probe_rng) {
  auto analytic = BatchLossAndGradients(net, batch, mode, noise_seed);
  if (!analytic.ok()) return analytic.status();
  auto loss = [&]() {
    auto r = BatchLossAndGradients(net, batch, mode, noise_seed);
    return r.ok() ? r->loss : std::numeric_limits<double>::quiet_NaN();
  };
  auto params = net.Parameters();
  return nn::FiniteDiffCheck(loss, params, analytic->grads, probes,
                             probe_rng);
}

}  // namespace rp::model
