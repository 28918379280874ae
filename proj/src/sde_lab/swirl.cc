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

#include "sde_lab/swirl.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "absl/strings/str_cat.h"

namespace rp::sde {
namespace {

std::size_t FloorMod(double x, std::size_t n) {
  const double m = std::fmod(std::floor(x), static_cast<double>(n));
  return static_cast<std::size_t>(m < 0 ? m + n : m);
}

}  // namespace

ImageGrid SwirlField(const ImageGrid& image) {
  ImageGrid out = image;
  const std::size_t rows = image.rows, cols = image.cols;
  for (std::size_t i = 0; i < rows; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / 180.0;
    const double di = static_cast<double>(i);
    const std::size_t offset_i = FloorMod(di + 50.0 * std::sin(angle), rows);
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t offset_j =
          FloorMod(static_cast<double>(j) + 50.0 * std::cos(angle), cols);
      const std::size_t src_i = (i + offset_j) % rows;
      const std::size_t src_j = (j + offset_i) % cols;
      for (std::size_t k = 0; k < image.channels; ++k) {
        out.at(i, j, k) = image.at(src_i, src_j, k);
      }
    }
  }
  return out;
}

absl::string_view SdeModeName(SdeMode mode) {
  switch (mode) {
    case SdeMode::kOde:
      return "ode";
    case SdeMode::kSdeAdditive:
      return "sde_additive";
    case SdeMode::kSdeMultiplicative:
      return "sde_multiplicative";
  }
  return "unknown";
}

absl::StatusOr<SdeMode> ParseSdeMode(absl::string_view name) {
  for (SdeMode m :
       {SdeMode::kOde, SdeMode::kSdeAdditive, SdeMode::kSdeMultiplicative}) {
    if (name == SdeModeName(m)) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown sde mode '", name,
                                                 "'"));
}

absl::Status SdeRunConfig::Validate() const {
  if (!(dt > 0.0) || !(t_end > 0.0) || !std::isfinite(dt) ||
      !std::isfinite(t_end)) {
    return absl::InvalidArgumentError("dt and t_end must be positive");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError("gamma must be finite and >= 0");
  }
  const double ratio = t_end / dt;
  if (std::round(ratio) < 1 ||
      std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    return absl::InvalidArgumentError(absl::StrCat(
        "t_end / dt = ", ratio, " is not a positive whole number of steps"));
  }
  return absl::OkStatus();
}

int SdeRunConfig::Steps() const {
  return static_cast<int>(std::lround(t_end / dt));
}

absl::StatusOr<Propagation> Propagate(const ImageGrid& image,
                                      const SdeRunConfig& config,
                                      Direction direction, nn::Rng& rng,
                                      bool keep_trajectory) {
  if (auto s = config.Validate(); !s.ok()) return s;
  if (image.pixels.size() != image.rows * image.cols * image.channels ||
      image.pixels.empty()) {
    return absl::InvalidArgumentError("malformed image");
  }
  const int steps = config.Steps();
  const double sign = direction == Direction::kForward ? 1.0 : -1.0;
  const double noise_scale = config.gamma * std::sqrt(config.dt);
  const bool noisy = config.mode != SdeMode::kOde && config.gamma > 0.0;
  Propagation result;
  ImageGrid x = image;
  if (keep_trajectory) {
    result.trajectory.reserve(steps + 1);
    result.trajectory.push_back(x);
  }
  for (int step = 0; step < steps; ++step) {
    const ImageGrid swirled = SwirlField(x);
    ImageGrid next = x;
    for (std::size_t p = 0; p < x.pixels.size(); ++p) {
      next.pixels[p] += sign * config.dt * (swirled.pixels[p] - x.pixels[p]);
    }
    if (noisy) {
      for (std::size_t p = 0; p < x.pixels.size(); ++p) {
        const double n = rng.Normal();
        next.pixels[p] += config.mode == SdeMode::kSdeAdditive
                              ? noise_scale * n
                              : noise_scale * x.pixels[p] * n;
      }
    }
    x = std::move(next);
    if (keep_trajectory) result.trajectory.push_back(x);
  }
  result.final_state = std::move(x);
  return result;
}

absl::StatusOr<double> ReconstructionError(const ImageGrid& a,
                                           const ImageGrid& b) {
  if (!a.SameShape(b) || a.pixels.size() != b.pixels.size()) {
    return absl::InvalidArgumentError("images differ in shape");
  }
  double diff = 0.0, norm = 0.0;
  for (std::size_t p = 0; p < a.pixels.size(); ++p) {
    diff += (a.pixels[p] - b.pixels[p]) * (a.pixels[p] - b.pixels[p]);
    norm += a.pixels[p] * a.pixels[p];
  }
  if (norm == 0.0) {
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::sqrt(diff) / std::sqrt(norm);
}

absl::StatusOr<RoundTrip> ForwardBackward(const ImageGrid& image,
                                          const SdeRunConfig& config) {
  nn::Rng root(config.seed);
  nn::Rng forward_rng = root.Fork(1);
  nn::Rng backward_rng = root.Fork(2);
  auto forward = Propagate(image, config, Direction::kForward, forward_rng,
                           /*keep_trajectory=*/false);
  if (!forward.ok()) return forward.status();
  auto backward = Propagate(forward->final_state, config, Direction::kBackward,
                            backward_rng, /*keep_trajectory=*/false);
  if (!backward.ok()) return backward.status();
  auto error = ReconstructionError(image, backward->final_state);
  if (!error.ok()) return error.status();
  return RoundTrip{std::move(forward->final_state),
                   std::move(backward->final_state), *error};
}

}  // namespace rp::sde
