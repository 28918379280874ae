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

#ifndef RP_RESIDUAL_MODEL_CHECKPOINT_H_
#define RP_RESIDUAL_MODEL_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "residual_model/ensemble.h"

namespace rp::model {

// Text checkpoint holding architecture, noise settings, the master seed and
// every parameter and batchnorm statistic as hex floats (exact round trip).
// See docs/checkpoint_format.md.
struct Checkpoint {
  std::uint64_t master_seed = 0;
  EnsembleModel ensemble;
};

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
absl::StatusOr<Checkpoint> ParseCheckpoint(const std::string& text);

absl::Status SaveCheckpoint(const Checkpoint& checkpoint,
                            const std::string& path);
absl::StatusOr<Checkpoint> LoadCheckpoint(const std::string& path);

}  // namespace rp::model

#endif  // RP_RESIDUAL_MODEL_CHECKPOINT_H_
