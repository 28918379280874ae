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

#ifndef RP_EXPERIMENT_HARNESS_RECORD_H_
#define RP_EXPERIMENT_HARNESS_RECORD_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "experiment_harness/config.h"
#include "json.hpp"

namespace rp::harness {

// One line series. Curves sharing `plot` are drawn in the same SVG.
struct Curve {
  std::string name;
  std::string plot;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
};

// A file produced by an experiment, written under the output directory.
struct Artifact {
  std::string name;
  std::string bytes;
};

struct ResultRecord {
  ExperimentConfig config;
  // Everything here is a pure function of (config, seed).
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  // Wall-clock measurements; kept out of metrics.json.
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  std::vector<Curve> curves;
  std::vector<Artifact> artifacts;
  std::vector<std::string> notes;
};

inline constexpr absl::string_view kRecordSchema = "rpexp-record v1";

// Full record: schema, resolved config, metrics, curves, timings, notes
// and the artifact manifest.
nlohmann::ordered_json RecordJson(const ResultRecord& record,
                                  const std::vector<std::string>& manifest);

// Deterministic subset: schema, kind, seed, resolved config without runtime
// keys, metrics and curves. Byte-identical across re-runs.
std::string MetricsJson(const ResultRecord& record);

// Writes via a temporary file in the same directory and a rename.
absl::Status WriteFileAtomic(const std::string& path, absl::string_view bytes);

// Writes artifacts, plots, metrics.json and record.json under `out_dir`
// (created if missing). Returns the manifest of file names.
absl::StatusOr<std::vector<std::string>> WriteRecord(
    const ResultRecord& record, const std::string& out_dir);

}  // namespace rp::harness

#endif  // RP_EXPERIMENT_HARNESS_RECORD_H_
