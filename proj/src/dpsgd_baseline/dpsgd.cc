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

#include "dpsgd_baseline/dpsgd.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "nn_core/loss.h"
#include "nn_core/optimizer.h"

namespace rp::dpsgd {

absl::Status DpSgdConfig::Validate() const {
  if (!(clip_norm > 0.0) || !std::isfinite(clip_norm)) {
    return absl::InvalidArgumentError("clip_norm must be positive and finite");
  }
  if (!(noise_multiplier >= 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError("noise_multiplier must be >= 0");
  }
  if (microbatch_size == 0) {
    return absl::InvalidArgumentError("microbatch_size must be >= 1");
  }
  if (train.batch_size % microbatch_size != 0) {
    return absl::InvalidArgumentError(
        "batch_size must be a multiple of microbatch_size");
  }
  return train.Validate();
}

double GlobalNorm(std::span<const nn::Tensor> grads) {
  double sq = 0.0;
  for (const nn::Tensor& g : grads) {
    for (double v : g.values()) sq += v * v;
  }
  return std::sqrt(sq);
}

double ClipGradient(std::span<nn::Tensor> grads, double clip_norm) {
  const double norm = GlobalNorm(grads);
  if (norm <= clip_norm) return 1.0;
  const double factor = clip_norm / norm;
  for (nn::Tensor& g : grads) {
    for (double& v : g.values()) v *= factor;
  }
  return factor;
}

std::vector<double> ClipVector(std::span<const double> g, double clip_norm) {
  std::vector<nn::Tensor> t = {nn::Tensor::FromVector({g.begin(), g.end()})};
  ClipGradient(t, clip_norm);
  const auto v = t[0].values();
  return {v.begin(), v.end()};
}

absl::StatusOr<std::vector<nn::Tensor>> NoisyAggregate(
    std::span<const std::vector<nn::Tensor>> clipped, double clip_norm,
    double noise_multiplier, double divisor, nn::Rng& rng) {
  if (clipped.empty()) return absl::InvalidArgumentError("empty batch");
  if (!(divisor > 0.0)) {
    return absl::InvalidArgumentError("divisor must be positive");
  }
  std::vector<nn::Tensor> sum = clipped.front();
  for (std::size_t n = 1; n < clipped.size(); ++n) {
    if (clipped[n].size() != sum.size()) {
      return absl::InvalidArgumentError("gradient lists differ in length");
    }
    for (std::size_t t = 0; t < sum.size(); ++t) {
      auto dst = sum[t].values();
      const auto src = clipped[n][t].values();
      if (src.size() != dst.size()) {
        return absl::InvalidArgumentError("gradient shapes differ");
      }
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  }
  const double scale = noise_multiplier * clip_norm;
  for (nn::Tensor& g : sum) {
    for (double& v : g.values()) {
      if (scale > 0.0) v += scale * rng.Normal();
      v /= divisor;
    }
  }
  return sum;
}

absl::StatusOr<DpSgdHistory> DpSgdTrain(model::ResidualNet& net,
                                        const nn::Dataset& train,
                                        const nn::Dataset* test,
                                        const DpSgdConfig& config) {
  if (auto s = config.Validate(); !s.ok()) return s;
  if (net.has_batch_norm()) {
    return absl::InvalidArgumentError(
        "per-example gradients need a network without batchnorm");
  }
  if (train.size() == 0) return absl::InvalidArgumentError("empty train set");
  const std::size_t k = net.spec().num_outputs;
  if (train.dim() != net.spec().input_dim ||
      (test != nullptr && test->size() > 0 &&
       test->dim() != net.spec().input_dim)) {
    return absl::InvalidArgumentError("dataset width does not match network");
  }
  if (train.num_classes > static_cast<int>(k) || k < 2) {
    return absl::InvalidArgumentError("too few network outputs");
  }
  const model::TrainConfig& tc = config.train;
  const auto started = std::chrono::steady_clock::now();
  nn::Rng root(tc.seed);
  nn::Rng shuffle_rng = root.Fork(model::kShuffleStream);
  nn::Rng noise_rng = root.Fork(model::kNoiseStream);
  nn::Rng eval_rng = root.Fork(model::kEvalStream);
  nn::Rng aggregate_rng = root.Fork(kAggregateNoiseStream);

  auto params = net.Parameters();
  std::vector<const nn::Tensor*> const_params(params.begin(), params.end());
  nn::OptimState state = nn::OptimState::Create(tc.optimizer, const_params);

  DpSgdHistory out;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    state.learning_rate = tc.LearningRateAt(epoch);
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t end = std::min(order.size(), start + tc.batch_size);
      const std::span<const std::size_t> rows(order.data() + start,
                                              end - start);
      const nn::Dataset batch = train.Subset(rows);
      model::ResidualNet::ForwardCache cache;
      auto logits =
          net.Forward(batch.features, nn::Mode::kTrain, noise_rng, &cache);
      if (!logits.ok()) return logits.status();

      std::vector<std::vector<nn::Tensor>> units;
      const std::size_t m = config.microbatch_size;
      for (std::size_t first = 0; first < rows.size(); first += m) {
        const std::size_t last = std::min(rows.size(), first + m);
        std::vector<nn::Tensor> grads = net.ZeroGradients();
        for (std::size_t i = first; i < last; ++i) {
          auto lg = nn::SoftmaxCrossEntropy(logits->row(i), batch.labels[i]);
          if (!lg.ok()) return lg.status();
          if (!std::isfinite(lg->loss)) {
            return absl::InternalError(absl::StrCat(
                "training diverged: non-finite loss at epoch ", epoch,
                ", step ", out.history.steps));
          }
          loss_sum += lg->loss;
          nn::Tensor grad_logits = nn::Tensor::Matrix(1, k);
          std::copy(lg->grad.begin(), lg->grad.end(),
                    grad_logits.values().begin());
          if (auto s = net.Backward(cache.Row(i), grad_logits, &grads);
              !s.ok()) {
            return s;
          }
        }
        if (last - first > 1) {
          const double count = static_cast<double>(last - first);
          for (nn::Tensor& g : grads) {
            for (double& v : g.values()) v /= count;
          }
        }
        ClipGradient(grads, config.clip_norm);
        units.push_back(std::move(grads));
      }
      const double divisor = static_cast<double>(units.size());
      auto pre_noise =
          NoisyAggregate(units, config.clip_norm, 0.0, divisor, aggregate_rng);
      if (!pre_noise.ok()) return pre_noise.status();
      out.max_mean_clipped_norm =
          std::max(out.max_mean_clipped_norm, GlobalNorm(*pre_noise));
      auto update = NoisyAggregate(units, config.clip_norm,
                                   config.noise_multiplier, divisor,
                                   aggregate_rng);
      if (!update.ok()) return update.status();
      if (auto s = nn::OptimizerStep(params, *update, &state); !s.ok()) {
        return absl::InternalError(absl::StrCat(
            "training diverged at epoch ", epoch, ", step ",
            out.history.steps, ": ", s.message()));
      }
      net.ProjectHead();
      ++out.history.steps;
      ++out.noisy_updates;
      out.clipped_units += static_cast<std::int64_t>(units.size());
    }
    model::EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = state.learning_rate;
    stats.train_loss = loss_sum / static_cast<double>(train.size());
    if (tc.eval_every_epoch || epoch + 1 == tc.epochs) {
      auto train_acc = model::Accuracy(net, train, eval_rng);
      if (!train_acc.ok()) return train_acc.status();
      stats.train_accuracy = *train_acc;
      if (test != nullptr && test->size() > 0) {
        auto test_acc = model::Accuracy(net, *test, eval_rng);
        if (!test_acc.ok()) return test_acc.status();
        stats.test_accuracy = *test_acc;
      }
    }
    out.history.epochs.push_back(stats);
  }
  out.history.seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
  if (tc.epochs > 0) out.seconds_per_epoch = out.history.seconds / tc.epochs;
  return out;
}

}  // namespace rp::dpsgd
