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

#ifndef RP_EXPERIMENT_HARNESS_PNG_IO_H_
#define RP_EXPERIMENT_HARNESS_PNG_IO_H_

#include <string>

#include "absl/status/statusor.h"
#include "sde_lab/image.h"

namespace rp::harness {

// 8-bit grayscale (1 channel) or RGB (3 channels) PNG. Values are clamped
// to [0, 1] and quantized like the PNM encoder.
absl::StatusOr<std::string> EncodePng(const sde::ImageGrid& image);
absl::StatusOr<sde::ImageGrid> DecodePng(const std::string& bytes);

}  // namespace rp::harness

#endif  // RP_EXPERIMENT_HARNESS_PNG_IO_H_
