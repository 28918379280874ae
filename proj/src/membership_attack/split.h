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

#ifndef RP_MEMBERSHIP_ATTACK_SPLIT_H_
#define RP_MEMBERSHIP_ATTACK_SPLIT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "nn_core/rng.h"

namespace rp::attack {

// Four disjoint, equally sized index sets over a pool.
struct DatasetSplit {
  std::vector<std::size_t> shadow_train;
  std::vector<std::size_t> shadow_out;
  std::vector<std::size_t> target_train;
  std::vector<std::size_t> target_out;
};

// Uniform random partition of the first 4 * floor(n / 4) positions of a
// random permutation of 0..n-1.
absl::StatusOr<DatasetSplit> SplitDataset(std::size_t n, nn::Rng& rng);

// As SplitDataset, but each class is shuffled separately and dealt
// round-robin so every part has (nearly) the same class mix.
absl::StatusOr<DatasetSplit> SplitDatasetStratified(std::span<const int> labels,
                                                    nn::Rng& rng);

}  // namespace rp::attack

#endif  // RP_MEMBERSHIP_ATTACK_SPLIT_H_
