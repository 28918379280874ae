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

#ifndef RP_EXPERIMENT_HARNESS_PLOTS_H_
#define RP_EXPERIMENT_HARNESS_PLOTS_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "experiment_harness/record.h"

namespace rp::harness {

// SVG canvas and plotting area, in pixels.
inline constexpr double kSvgWidth = 480.0;
inline constexpr double kSvgHeight = 360.0;
inline constexpr double kPlotLeft = 64.0;
inline constexpr double kPlotTop = 24.0;
inline constexpr double kPlotWidth = 392.0;
inline constexpr double kPlotHeight = 280.0;

// Data range shown on one axis. Degenerate ranges are widened by 0.5 on
// each side.
struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};
AxisRange RangeOf(const std::vector<const Curve*>& curves, bool x_axis);

// Pixel position of a data point.
double ToPixelX(double x, const AxisRange& range);
double ToPixelY(double y, const AxisRange& range);

// Header "x_label,y_label" (RFC 4180 quoting) and one row per point with
// shortest round-trip number formatting.
std::string CurveCsv(const Curve& curve);
absl::StatusOr<Curve> ParseCurveCsv(absl::string_view text);

// Self-contained SVG 1.1 with labeled axes, tick values, one polyline per
// curve and a legend.
std::string RenderSvg(const std::vector<const Curve*>& curves,
                      absl::string_view title);

// One CSV per curve (<name>.csv) and one SVG per plot group (<plot>.svg).
// An empty curve list yields no files and appends a note.
std::vector<Artifact> EmitPlots(const std::vector<Curve>& curves,
                                std::vector<std::string>* notes);

}  // namespace rp::harness

#endif  // RP_EXPERIMENT_HARNESS_PLOTS_H_
