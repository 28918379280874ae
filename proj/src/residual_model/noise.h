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

#ifndef RP_RESIDUAL_MODEL_NOISE_H_
#define RP_RESIDUAL_MODEL_NOISE_H_

#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nn_core/rng.h"
#include "nn_core/tensor.h"

namespace rp::model {

enum class NoiseStrategy { kNone, kAdditive, kMultiplicative };

absl::string_view NoiseStrategyName(NoiseStrategy strategy);
absl::StatusOr<NoiseStrategy> ParseNoiseStrategy(absl::string_view name);

inline constexpr double kDefaultEta = 0.1;

// Noise coefficients of a perturbed residual network.
//   additive:       x0 = x + pi n,  x_{i+1} = x_i + phi(U x_i) + gamma n
//   multiplicative: x_{i+1} = x_i + phi(U x_i) + gamma clip(x_i, eta) * n,
//                   logits get scalar noise pi ||x_M|| n per output
struct NoiseConfig {
  NoiseStrategy strategy = NoiseStrategy::kNone;
  double gamma = 0.0;
  double pi = 0.0;
  double eta = kDefaultEta;

  static NoiseConfig None() { return {}; }
  // pi defaults to gamma / 2.
  static NoiseConfig Additive(double gamma);
  static NoiseConfig Additive(double gamma, double pi);
  static NoiseConfig Multiplicative(double gamma, double pi,
                                    double eta = kDefaultEta);

  absl::Status Validate() const;
  bool active() const { return gamma > 0.0 || pi > 0.0; }
};

// sgn(x_j) * max(|x_j|, eta) with sgn(0) = +1.
std::vector<double> ClipAwayFromZero(std::span<const double> x, double eta);

// x + pi * n with a fresh standard normal draw per coordinate.
nn::Tensor InputPerturb(const nn::Tensor& x, double pi, nn::Rng& rng);

}  // namespace rp::model

#endif  // RP_RESIDUAL_MODEL_NOISE_H_
