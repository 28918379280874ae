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

#include "membership_attack/metrics.h"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <utility>

#include "absl/strings/str_cat.h"
#include "nn_core/format.h"

namespace rp::attack {
namespace {

std::string Num(double v) { return nn::FormatDouble(v); }

}  // namespace

std::vector<RocPoint> RocCurve(std::span<const double> positive_scores,
                               std::span<const double> negative_scores) {
  // (score, is_positive) sorted by descending score.
  std::vector<std::pair<double, bool>> all;
  all.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) all.emplace_back(s, true);
  for (double s : negative_scores) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  const double p = static_cast<double>(positive_scores.size());
  const double n = static_cast<double>(negative_scores.size());
  std::vector<RocPoint> roc = {{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    const double score = all[i].first;
    while (i < all.size() && all[i].first == score) {
      (all[i].second ? tp : fp) += 1;
      ++i;
    }
    roc.push_back({n > 0 ? fp / n : 0.0, p > 0 ? tp / p : 0.0});
  }
  // Exact endpoint even when one class is empty.
  roc.back() = {1.0, 1.0};
  return roc;
}

double TrapezoidArea(std::span<const RocPoint> roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2;
  }
  return area;
}

ThresholdRow EvaluateThreshold(std::span<const double> positive_scores,
                               std::span<const double> negative_scores,
                               double threshold) {
  ThresholdRow row;
  row.threshold = threshold;
  for (double s : positive_scores) {
    (s >= threshold ? row.true_positives : row.false_negatives) += 1;
  }
  for (double s : negative_scores) {
    (s >= threshold ? row.false_positives : row.true_negatives) += 1;
  }
  const auto predicted = row.true_positives + row.false_positives;
  row.precision = predicted == 0 ? 0.0
                                 : static_cast<double>(row.true_positives) /
                                       static_cast<double>(predicted);
  row.recall = positive_scores.empty()
                   ? 0.0
                   : static_cast<double>(row.true_positives) /
                         static_cast<double>(positive_scores.size());
  return row;
}

absl::StatusOr<AttackReport> BuildAttackReport(
    std::span<const double> positive_scores,
    std::span<const double> negative_scores,
    std::span<const double> thresholds) {
  if (positive_scores.empty() || negative_scores.empty()) {
    return absl::InvalidArgumentError(
        "attack evaluation needs member and non-member scores");
  }
  AttackReport report;
  report.roc = RocCurve(positive_scores, negative_scores);
  report.auc = TrapezoidArea(report.roc);
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  for (double t : thresholds) {
    report.table.push_back(
        EvaluateThreshold(positive_scores, negative_scores, t));
  }
  report.positives = static_cast<std::int64_t>(positive_scores.size());
  report.negatives = static_cast<std::int64_t>(negative_scores.size());
  return report;
}

std::string RenderAttackReport(const AttackReport& report) {
  std::string out = absl::StrCat("auc=", Num(report.auc), "\n",
                                 "positives=", report.positives, "\n",
                                 "negatives=", report.negatives, "\n",
                                 "roc_points=", report.roc.size(), "\n");
  out += "threshold,precision,recall,tp,fp,fn,tn\n";
  for (const ThresholdRow& r : report.table) {
    absl::StrAppend(&out, Num(r.threshold), ",", Num(r.precision), ",",
                    Num(r.recall), ",", r.true_positives, ",",
                    r.false_positives, ",", r.false_negatives, ",",
                    r.true_negatives, "\n");
  }
  return out;
}

std::string RocCsv(const AttackReport& report) {
  std::string out = "fpr,tpr\n";
  for (const RocPoint& p : report.roc) {
    absl::StrAppend(&out, Num(p.fpr), ",", Num(p.tpr), "\n");
  }
  return out;
}

}  // namespace rp::attack
