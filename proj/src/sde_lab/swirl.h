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

#ifndef RP_SDE_LAB_SWIRL_H_
#define RP_SDE_LAB_SWIRL_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nn_core/rng.h"
#include "sde_lab/image.h"

namespace rp::sde {

// Relocates pixels: with a = 2 pi i / 180,
//   oj = floor(j + 50 cos a) mod cols, oi = floor(i + 50 sin a) mod rows,
//   out[i, j, k] = in[(i + oj) mod rows, (j + oi) mod cols, k].
ImageGrid SwirlField(const ImageGrid& image);

enum class SdeMode { kOde, kSdeAdditive, kSdeMultiplicative };
enum class Direction { kForward, kBackward };

absl::string_view SdeModeName(SdeMode mode);
absl::StatusOr<SdeMode> ParseSdeMode(absl::string_view name);

struct SdeRunConfig {
  SdeMode mode = SdeMode::kOde;
  double gamma = 0.0;
  double dt = 0.01;
  double t_end = 1.0;
  std::uint64_t seed = 0;

  absl::Status Validate() const;
  // t_end / dt, rounded; Validate() checks it is a whole positive number.
  int Steps() const;
};

struct Propagation {
  ImageGrid final_state;
  std::vector<ImageGrid> trajectory;  // Steps() + 1 states, input first
};

// Explicit Euler(-Maruyama) integration of dx = F(x) dt (+ noise) with
// F(x) = SwirlField(x) - x. Forward steps add dt F(x), backward steps
// subtract it; sde modes add gamma sqrt(dt) n (additive) or
// gamma sqrt(dt) x * n (multiplicative) with n drawn from `rng` in pixel
// order. gamma = 0 draws nothing.
absl::StatusOr<Propagation> Propagate(const ImageGrid& image,
                                      const SdeRunConfig& config,
                                      Direction direction, nn::Rng& rng,
                                      bool keep_trajectory = true);

// ||a - b||_2 / ||a||_2.
absl::StatusOr<double> ReconstructionError(const ImageGrid& a,
                                           const ImageGrid& b);

// Forward then backward with independent noise streams derived from
// config.seed; returns the relative reconstruction error.
struct RoundTrip {
  ImageGrid forward;
  ImageGrid recovered;
  double error = 0.0;
};
absl::StatusOr<RoundTrip> ForwardBackward(const ImageGrid& image,
                                          const SdeRunConfig& config);

}  // namespace rp::sde

#endif  // RP_SDE_LAB_SWIRL_H_
