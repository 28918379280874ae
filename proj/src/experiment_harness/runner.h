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

#ifndef RP_EXPERIMENT_HARNESS_RUNNER_H_
#define RP_EXPERIMENT_HARNESS_RUNNER_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "experiment_harness/config.h"
#include "experiment_harness/record.h"

namespace rp::harness {

// AUC band treated as "attack no better than guessing".
inline constexpr double kChanceAucLow = 0.45;
inline constexpr double kChanceAucHigh = 0.55;

// Runs the experiment `config.kind` names. Errors carry the failing stage
// as a "stage: " prefix. Nothing is written to disk.
absl::StatusOr<ResultRecord> RunExperiment(const ExperimentConfig& config);

// RunExperiment followed by WriteRecord into config.out_dir.
absl::StatusOr<ResultRecord> RunAndWrite(const ExperimentConfig& config,
                                         std::vector<std::string>* manifest);

// Least-squares slope of y on x (0 when x has no spread).
double RegressionSlope(const std::vector<double>& x,
                       const std::vector<double>& y);

}  // namespace rp::harness

#endif  // RP_EXPERIMENT_HARNESS_RUNNER_H_
