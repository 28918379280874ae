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

#include "experiment_harness/plots.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "experiment_harness/dataset_io.h"
#include "nn_core/format.h"

namespace rp::harness {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f"};

std::string CsvQuote(absl::string_view field) {
  if (field.find_first_of(",\"\r\n") == absl::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string XmlEscape(absl::string_view text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(ch);
    }
  }
  return out;
}

// Compact pixel coordinates.
std::string Px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

AxisRange RangeOf(const std::vector<const Curve*>& curves, bool x_axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Curve* c : curves) {
    for (const auto& [x, y] : c->points) {
      const double v = x_axis ? x : y;
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo <= 0.0) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

double ToPixelX(double x, const AxisRange& r) {
  return kPlotLeft + (x - r.lo) / (r.hi - r.lo) * kPlotWidth;
}

double ToPixelY(double y, const AxisRange& r) {
  return kPlotTop + (1.0 - (y - r.lo) / (r.hi - r.lo)) * kPlotHeight;
}

std::string CurveCsv(const Curve& curve) {
  std::string out =
      absl::StrCat(CsvQuote(curve.x_label), ",", CsvQuote(curve.y_label), "\n");
  for (const auto& [x, y] : curve.points) {
    absl::StrAppend(&out, nn::FormatDouble(x), ",", nn::FormatDouble(y), "\n");
  }
  return out;
}

absl::StatusOr<Curve> ParseCurveCsv(absl::string_view text) {
  auto records = ParseCsv(text);
  if (!records.ok()) return records.status();
  if (records->empty() || records->front().size() != 2) {
    return absl::InvalidArgumentError("curve CSV needs a 2-column header");
  }
  Curve curve;
  curve.x_label = (*records)[0][0];
  curve.y_label = (*records)[0][1];
  for (std::size_t r = 1; r < records->size(); ++r) {
    const auto& rec = (*records)[r];
    double x, y;
    if (rec.size() != 2 || !absl::SimpleAtod(rec[0], &x) ||
        !absl::SimpleAtod(rec[1], &y)) {
      return absl::InvalidArgumentError(
          absl::StrCat("curve CSV row ", r + 1, " is malformed"));
    }
    curve.points.emplace_back(x, y);
  }
  return curve;
}

std::string RenderSvg(const std::vector<const Curve*>& curves,
                      absl::string_view title) {
  const AxisRange xr = RangeOf(curves, true);
  const AxisRange yr = RangeOf(curves, false);
  std::string out = absl::StrCat(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"",
      kSvgWidth, "\" height=\"", kSvgHeight, "\" viewBox=\"0 0 ", kSvgWidth,
      " ", kSvgHeight, "\" font-family=\"sans-serif\" font-size=\"11\">\n",
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  absl::StrAppend(&out, "<text x=\"", Px(kSvgWidth / 2), "\" y=\"14\" "
                  "text-anchor=\"middle\" font-size=\"13\">",
                  XmlEscape(title), "</text>\n");
  // Axes box and ticks.
  absl::StrAppend(&out, "<rect x=\"", Px(kPlotLeft), "\" y=\"", Px(kPlotTop),
                  "\" width=\"", Px(kPlotWidth), "\" height=\"",
                  Px(kPlotHeight), "\" fill=\"none\" stroke=\"black\"/>\n");
  for (int t = 0; t <= 4; ++t) {
    const double fx = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    const double px = ToPixelX(fx, xr);
    const double py = ToPixelY(fy, yr);
    const double bottom = kPlotTop + kPlotHeight;
    absl::StrAppend(&out, "<line x1=\"", Px(px), "\" y1=\"", Px(bottom),
                    "\" x2=\"", Px(px), "\" y2=\"", Px(bottom + 4),
                    "\" stroke=\"black\"/>\n");
    absl::StrAppend(&out, "<text x=\"", Px(px), "\" y=\"", Px(bottom + 16),
                    "\" text-anchor=\"middle\">", Px(fx), "</text>\n");
    absl::StrAppend(&out, "<line x1=\"", Px(kPlotLeft - 4), "\" y1=\"",
                    Px(py), "\" x2=\"", Px(kPlotLeft), "\" y2=\"", Px(py),
                    "\" stroke=\"black\"/>\n");
    absl::StrAppend(&out, "<text x=\"", Px(kPlotLeft - 6), "\" y=\"",
                    Px(py + 4), "\" text-anchor=\"end\">", Px(fy),
                    "</text>\n");
  }
  const std::string x_label = curves.empty() ? "" : curves.front()->x_label;
  const std::string y_label = curves.empty() ? "" : curves.front()->y_label;
  absl::StrAppend(&out, "<text class=\"x-label\" x=\"",
                  Px(kPlotLeft + kPlotWidth / 2), "\" y=\"",
                  Px(kSvgHeight - 8), "\" text-anchor=\"middle\">",
                  XmlEscape(x_label), "</text>\n");
  absl::StrAppend(&out, "<text class=\"y-label\" x=\"14\" y=\"",
                  Px(kPlotTop + kPlotHeight / 2),
                  "\" text-anchor=\"middle\" transform=\"rotate(-90 14 ",
                  Px(kPlotTop + kPlotHeight / 2), ")\">", XmlEscape(y_label),
                  "</text>\n");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string points;
    for (const auto& [x, y] : curves[i]->points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!points.empty()) points.push_back(' ');
      absl::StrAppend(&points, Px(ToPixelX(x, xr)), ",", Px(ToPixelY(y, yr)));
    }
    absl::StrAppend(&out, "<polyline fill=\"none\" stroke=\"", color,
                    "\" stroke-width=\"1.5\" points=\"", points, "\"/>\n");
    const double ly = kPlotTop + 12 + 14 * static_cast<double>(i);
    absl::StrAppend(&out, "<text x=\"", Px(kPlotLeft + kPlotWidth - 6),
                    "\" y=\"", Px(ly), "\" text-anchor=\"end\" fill=\"", color,
                    "\">", XmlEscape(curves[i]->name), "</text>\n");
  }
  out += "</svg>\n";
  return out;
}

std::vector<Artifact> EmitPlots(const std::vector<Curve>& curves,
                                std::vector<std::string>* notes) {
  std::vector<Artifact> out;
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Curve*>> groups;
  for (const Curve& c : curves) {
    if (c.points.empty()) continue;
    out.push_back({c.name + ".csv", CurveCsv(c)});
    const std::string plot = c.plot.empty() ? c.name : c.plot;
    if (!groups.count(plot)) order.push_back(plot);
    groups[plot].push_back(&c);
  }
  if (out.empty()) {
    if (notes != nullptr) notes->push_back("no curve data; no plots emitted");
    return out;
  }
  for (const std::string& plot : order) {
    out.push_back({plot + ".svg", RenderSvg(groups[plot], plot)});
  }
  return out;
}

}  // namespace rp::harness
