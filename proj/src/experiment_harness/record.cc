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

#include "experiment_harness/record.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "absl/strings/str_cat.h"
#include "experiment_harness/plots.h"

namespace rp::harness {
namespace {

nlohmann::ordered_json CurvesJson(const std::vector<Curve>& curves) {
  auto out = nlohmann::ordered_json::array();
  for (const Curve& c : curves) {
    auto points = nlohmann::ordered_json::array();
    for (const auto& [x, y] : c.points) points.push_back({x, y});
    out.push_back({{"name", c.name},
                   {"plot", c.plot},
                   {"x_label", c.x_label},
                   {"y_label", c.y_label},
                   {"points", std::move(points)}});
  }
  return out;
}

nlohmann::ordered_json ConfigJson(const ExperimentConfig& config,
                                  bool include_runtime) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [key, value] : ResolvedSettings(config, include_runtime)) {
    out[key] = value;
  }
  return out;
}

}  // namespace

nlohmann::ordered_json RecordJson(const ResultRecord& record,
                                  const std::vector<std::string>& manifest) {
  nlohmann::ordered_json out;
  out["schema"] = kRecordSchema;
  out["kind"] = ExperimentKindName(record.config.kind);
  out["seed"] = record.config.seed;
  out["config"] = ConfigJson(record.config, true);
  out["metrics"] = record.metrics;
  out["curves"] = CurvesJson(record.curves);
  out["timings"] = record.timings;
  out["notes"] = record.notes;
  out["artifacts"] = manifest;
  return out;
}

std::string MetricsJson(const ResultRecord& record) {
  nlohmann::ordered_json out;
  out["schema"] = kRecordSchema;
  out["kind"] = ExperimentKindName(record.config.kind);
  out["seed"] = record.config.seed;
  out["config"] = ConfigJson(record.config, false);
  out["metrics"] = record.metrics;
  out["curves"] = CurvesJson(record.curves);
  return out.dump(2) + "\n";
}

absl::Status WriteFileAtomic(const std::string& path, absl::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return absl::InternalError(absl::StrCat("cannot create ", tmp));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) return absl::InternalError(absl::StrCat("cannot write ", tmp));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    return absl::InternalError(absl::StrCat("cannot rename ", tmp, " to ",
                                            path));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::string>> WriteRecord(
    const ResultRecord& record, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create ", out_dir, ": ", ec.message()));
  }
  std::vector<std::string> manifest;
  auto write = [&](const Artifact& a) -> absl::Status {
    if (auto s = WriteFileAtomic(
            (std::filesystem::path(out_dir) / a.name).string(), a.bytes);
        !s.ok()) {
      return s;
    }
    manifest.push_back(a.name);
    return absl::OkStatus();
  };
  for (const Artifact& a : record.artifacts) {
    if (auto s = write(a); !s.ok()) return s;
  }
  ResultRecord with_notes = record;
  for (const Artifact& a : EmitPlots(record.curves, &with_notes.notes)) {
    if (auto s = write(a); !s.ok()) return s;
  }
  if (auto s = write({"metrics.json", MetricsJson(record)}); !s.ok()) return s;
  manifest.push_back("record.json");
  const std::string full = RecordJson(with_notes, manifest).dump(2) + "\n";
  if (auto s = WriteFileAtomic(
          (std::filesystem::path(out_dir) / "record.json").string(), full);
      !s.ok()) {
    return s;
  }
  return manifest;
}

}  // namespace rp::harness
