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

#include "residual_model/noise.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace rp::model {

absl::string_view NoiseStrategyName(NoiseStrategy strategy) {
  switch (strategy) {
    case NoiseStrategy::kNone:
      return "none";
    case NoiseStrategy::kAdditive:
      return "additive";
    case NoiseStrategy::kMultiplicative:
      return "multiplicative";
  }
  return "unknown";
}

absl::StatusOr<NoiseStrategy> ParseNoiseStrategy(absl::string_view name) {
  if (name == "none") return NoiseStrategy::kNone;
  if (name == "additive" || name == "I") return NoiseStrategy::kAdditive;
  if (name == "multiplicative" || name == "II") {
    return NoiseStrategy::kMultiplicative;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown noise strategy '", name, "'"));
}

NoiseConfig NoiseConfig::Additive(double gamma) {
  return Additive(gamma, gamma / 2.0);
}

NoiseConfig NoiseConfig::Additive(double gamma, double pi) {
  return {NoiseStrategy::kAdditive, gamma, pi, kDefaultEta};
}

NoiseConfig NoiseConfig::Multiplicative(double gamma, double pi, double eta) {
  return {NoiseStrategy::kMultiplicative, gamma, pi, eta};
}

absl::Status NoiseConfig::Validate() const {
  if (!(gamma >= 0.0) || !(pi >= 0.0) || !std::isfinite(gamma) ||
      !std::isfinite(pi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise coefficients must be finite and >= 0, got gamma=",
                     gamma, " pi=", pi));
  }
  if (strategy == NoiseStrategy::kNone && (gamma != 0.0 || pi != 0.0)) {
    return absl::InvalidArgumentError(
        "strategy 'none' requires gamma = pi = 0");
  }
  if (strategy == NoiseStrategy::kMultiplicative && !(eta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("multiplicative noise needs eta > 0, got ", eta));
  }
  return absl::OkStatus();
}

std::vector<double> ClipAwayFromZero(std::span<const double> x, double eta) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double magnitude = std::max(std::abs(x[i]), eta);
    out[i] = std::signbit(x[i]) && x[i] != 0.0 ? -magnitude : magnitude;
  }
  return out;
}

nn::Tensor InputPerturb(const nn::Tensor& x, double pi, nn::Rng& rng) {
  nn::Tensor out = x;
  if (pi == 0.0) return out;
  for (double& v : out.values()) v += pi * rng.Normal();
  return out;
}

}  // namespace rp::model
