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

#include "membership_attack/attack_model.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "nn_core/loss.h"
#include "nn_core/optimizer.h"

namespace rp::attack {
namespace {

nn::Tensor Stack(std::span<const std::vector<double>> rows) {
  nn::Tensor x = nn::Tensor::Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), x.row(i).begin());
  }
  return x;
}

}  // namespace

std::vector<double> TopK(std::span<const double> probabilities,
                         std::size_t k) {
  std::vector<double> sorted(probabilities.begin(), probabilities.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  sorted.resize(std::min(k, sorted.size()));
  return sorted;
}

absl::StatusOr<std::vector<std::vector<double>>> ExtractFeatures(
    model::EnsembleModel& model, const nn::Tensor& x, std::size_t k,
    nn::Rng& rng) {
  auto probs = model::EnsemblePredict(model, x, rng, nn::Mode::kEval);
  if (!probs.ok()) return probs.status();
  if (k == 0 || k > probs->cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "top-k of ", k, " needs between 1 and ", probs->cols(), " classes"));
  }
  std::vector<std::vector<double>> out(probs->rows());
  for (std::size_t n = 0; n < probs->rows(); ++n) {
    out[n] = TopK(probs->row(n), k);
  }
  return out;
}

absl::StatusOr<AttackModel> AttackModel::Train(
    std::span<const FeatureRecord> data, const AttackConfig& config,
    nn::Rng& rng) {
  if (data.empty()) return absl::InvalidArgumentError("no attack records");
  const std::size_t k = data.front().features.size();
  bool seen[2] = {false, false};
  for (const FeatureRecord& r : data) {
    if (r.features.size() != k || k == 0) {
      return absl::InvalidArgumentError("feature records differ in length");
    }
    if (r.label != 0 && r.label != 1) {
      return absl::InvalidArgumentError("membership labels must be 0 or 1");
    }
    seen[r.label] = true;
  }
  if (!seen[0] || !seen[1]) {
    return absl::InvalidArgumentError(
        "attack training needs both member and non-member records");
  }
  if (config.epochs < 0 || config.batch_size == 0 || config.hidden == 0) {
    return absl::InvalidArgumentError("invalid attack training config");
  }
  AttackModel model;
  model.hidden_ = nn::MakeDense(k, config.hidden, true, rng);
  model.relu_ = nn::MakeActivation(nn::ActivationKind::kRelu);
  model.output_ = nn::MakeDense(config.hidden, 2, true, rng);
  std::vector<nn::Tensor*> params = {&model.hidden_.weight, &*model.hidden_.bias,
                                     &model.output_.weight, &*model.output_.bias};
  std::vector<const nn::Tensor*> const_params(params.begin(), params.end());
  nn::OptimizerConfig opt;
  opt.kind = nn::OptimizerKind::kAdam;
  opt.learning_rate = config.learning_rate;
  nn::OptimState state = nn::OptimState::Create(opt, const_params);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      nn::Tensor x = nn::Tensor::Matrix(end - start, k);
      for (std::size_t i = start; i < end; ++i) {
        const auto& f = data[order[i]].features;
        std::copy(f.begin(), f.end(), x.row(i - start).begin());
      }
      nn::LayerCache c1, c2, c3;
      auto h = nn::LayerForward(x, nn::Mode::kTrain, &model.hidden_, &c1);
      if (!h.ok()) return h.status();
      auto a = nn::LayerForward(*h, nn::Mode::kTrain, &model.relu_, &c2);
      if (!a.ok()) return a.status();
      auto logits = nn::LayerForward(*a, nn::Mode::kTrain, &model.output_, &c3);
      if (!logits.ok()) return logits.status();
      nn::Tensor g(logits->shape());
      for (std::size_t i = start; i < end; ++i) {
        auto lg = nn::SoftmaxCrossEntropy(logits->row(i - start),
                                          data[order[i]].label);
        if (!lg.ok()) return lg.status();
        std::copy(lg->grad.begin(), lg->grad.end(), g.row(i - start).begin());
      }
      nn::LayerGrads g3 = nn::ZeroGrads(model.output_);
      nn::LayerGrads g1 = nn::ZeroGrads(model.hidden_);
      nn::LayerGrads unused;
      nn::Tensor ga = nn::LayerBackward(model.output_, c3, g, &g3);
      nn::Tensor gh = nn::LayerBackward(model.relu_, c2, ga, &unused);
      nn::LayerBackward(model.hidden_, c1, gh, &g1);
      std::vector<nn::Tensor> grads = {g1.weight, g1.bias, g3.weight, g3.bias};
      const double b = static_cast<double>(end - start);
      for (nn::Tensor& t : grads) {
        for (double& v : t.values()) v /= b;
      }
      if (auto s = nn::OptimizerStep(params, grads, &state); !s.ok()) {
        return absl::InternalError(
            absl::StrCat("attack model training diverged: ", s.message()));
      }
    }
  }
  std::size_t correct = 0;
  for (const FeatureRecord& r : data) {
    const int predicted = model.MembershipScore(r.features) >= 0.5 ? 1 : 0;
    if (predicted == r.label) ++correct;
  }
  model.train_accuracy_ =
      static_cast<double>(correct) / static_cast<double>(data.size());
  return model;
}

double AttackModel::MembershipScore(std::span<const double> features) const {
  const std::vector<std::vector<double>> one = {
      std::vector<double>(features.begin(), features.end())};
  return Scores(one).front();
}

std::vector<double> AttackModel::Scores(
    std::span<const std::vector<double>> features) const {
  if (features.empty()) return {};
  const nn::Tensor x = Stack(features);
  // Layer parameters are not modified in eval mode; copies keep this const.
  nn::LayerParams hidden = hidden_, relu = relu_, output = output_;
  auto h = nn::LayerForward(x, nn::Mode::kEval, &hidden, nullptr);
  if (!h.ok()) {
    return std::vector<double>(features.size(),
                               std::numeric_limits<double>::quiet_NaN());
  }
  auto a = nn::LayerForward(*h, nn::Mode::kEval, &relu, nullptr);
  auto logits = nn::LayerForward(*a, nn::Mode::kEval, &output, nullptr);
  std::vector<double> scores(features.size());
  for (std::size_t n = 0; n < features.size(); ++n) {
    scores[n] = nn::Softmax(logits->row(n))[1];
  }
  return scores;
}

}  // namespace rp::attack
