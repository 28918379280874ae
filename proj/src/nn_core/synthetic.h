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

#ifndef RP_NN_CORE_SYNTHETIC_H_
#define RP_NN_CORE_SYNTHETIC_H_

#include <cstddef>

#include "absl/status/statusor.h"
#include "nn_core/dataset.h"
#include "nn_core/rng.h"

namespace rp::nn {

// Isotropic Gaussian clusters. Class c is centered at `separation` times a
// random unit vector; points are center + spread * N(0, I). Labels cycle
// through the classes so every class has floor(n / classes) or one more
// examples.
absl::StatusOr<Dataset> MakeBlobs(std::size_t n, std::size_t dim,
                                  int num_classes, double separation,
                                  double spread, Rng& rng);

// Two interleaving half circles in the first two coordinates with Gaussian
// jitter; remaining coordinates (dim > 2) are pure noise of the same scale.
absl::StatusOr<Dataset> MakeMoons(std::size_t n, std::size_t dim,
                                  double jitter, Rng& rng);

}  // namespace rp::nn

#endif  // RP_NN_CORE_SYNTHETIC_H_
