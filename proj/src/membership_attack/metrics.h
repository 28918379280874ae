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

#ifndef RP_MEMBERSHIP_ATTACK_METRICS_H_
#define RP_MEMBERSHIP_ATTACK_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace rp::attack {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct ThresholdRow {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  // Raw confusion counts with "member" predicted when score >= threshold.
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t false_negatives = 0;
  std::int64_t true_negatives = 0;
};

struct AttackReport {
  double auc = 0.0;
  std::vector<RocPoint> roc;
  std::vector<ThresholdRow> table;
  std::vector<double> thresholds;
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
};

inline const std::vector<double>& DefaultThresholds() {
  static const std::vector<double> kThresholds = {0.4, 0.5, 0.6, 0.7};
  return kThresholds;
}

// ROC over every distinct score cutpoint, from (0, 0) to (1, 1). Tied
// scores move both rates at once, which makes the trapezoid area equal the
// probability that a positive outscores a negative (ties count 1/2).
std::vector<RocPoint> RocCurve(std::span<const double> positive_scores,
                               std::span<const double> negative_scores);
double TrapezoidArea(std::span<const RocPoint> roc);

ThresholdRow EvaluateThreshold(std::span<const double> positive_scores,
                               std::span<const double> negative_scores,
                               double threshold);

// Full report; fails when either score list is empty.
absl::StatusOr<AttackReport> BuildAttackReport(
    std::span<const double> positive_scores,
    std::span<const double> negative_scores,
    std::span<const double> thresholds);

// key=value summary lines followed by the threshold table.
std::string RenderAttackReport(const AttackReport& report);
// "fpr,tpr" header plus one row per ROC point.
std::string RocCsv(const AttackReport& report);

}  // namespace rp::attack

#endif  // RP_MEMBERSHIP_ATTACK_METRICS_H_
