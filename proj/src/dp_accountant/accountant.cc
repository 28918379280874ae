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

#include "dp_accountant/accountant.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <type_traits>

#include "absl/strings/str_cat.h"
#include "boost/math/special_functions/beta.hpp"

namespace rp::dp {
namespace {

absl::Status CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

absl::Status CheckLambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must lie in (0, 1), got ", lambda));
  }
  return absl::OkStatus();
}

// Noise needed per unit bound: sqrt(2 P alpha / (lambda eps)).
double Strategy1Factor(const DpBudget& budget,
                       const CalibrationInputs& inputs) {
  const double p = static_cast<double>(inputs.Participations());
  return std::sqrt(2.0 * p * CalibrationAlpha(budget) /
                   (budget.lambda_split * budget.epsilon));
}

}  // namespace

absl::Status DpBudget::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (auto s = CheckDelta(delta); !s.ok()) return s;
  return CheckLambda(lambda_split);
}

absl::Status CalibrationInputs::Validate() const {
  if (iterations < 1 || batch_size < 1 || train_size < 1 || num_blocks < 1) {
    return absl::InvalidArgumentError("T, b, N and M must be positive");
  }
  if (batch_size > train_size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "batch size ", batch_size, " exceeds training set size ", train_size));
  }
  for (double v : {input_bound, residual_bound, eta, head_bound}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError("R, G, eta and a must be positive");
    }
  }
  if (!(activation_bound >= 0.0) || !std::isfinite(activation_bound)) {
    return absl::InvalidArgumentError("B must be nonnegative");
  }
  return absl::OkStatus();
}

std::int64_t CalibrationInputs::Participations() const {
  const std::int64_t work = iterations * batch_size;
  return (work + train_size - 1) / train_size;
}

absl::StatusOr<RdpPoint> GaussianRdp(double alpha, double sensitivity,
                                     double sigma) {
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be positive, got ", sigma));
  }
  if (!(alpha > 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must exceed 1, got ", alpha));
  }
  if (!(sensitivity >= 0.0)) {
    return absl::InvalidArgumentError("sensitivity must be nonnegative");
  }
  return RdpPoint{alpha,
                  alpha * sensitivity * sensitivity / (2.0 * sigma * sigma)};
}

absl::StatusOr<RdpPoint> RdpCompose(std::span<const RdpPoint> points) {
  if (points.empty()) return absl::InvalidArgumentError("nothing to compose");
  RdpPoint out{points[0].alpha, 0.0};
  for (const RdpPoint& p : points) {
    if (p.alpha != out.alpha) {
      return absl::InvalidArgumentError(absl::StrCat(
          "cannot compose orders ", out.alpha, " and ", p.alpha));
    }
    out.eps_rdp += p.eps_rdp;
  }
  return out;
}

absl::StatusOr<double> RdpToDp(const RdpPoint& point, double delta) {
  if (auto s = CheckDelta(delta); !s.ok()) return s;
  if (!(point.alpha > 1.0)) {
    return absl::InvalidArgumentError("alpha must exceed 1");
  }
  return point.eps_rdp + std::log(1.0 / delta) / (point.alpha - 1.0);
}

double CalibrationAlpha(const DpBudget& budget) {
  return std::log(1.0 / budget.delta) /
             ((1.0 - budget.lambda_split) * budget.epsilon) +
         1.0;
}

std::vector<LayerEpsilon> PerLayerEpsilons(const DpBudget& budget,
                                           std::int64_t num_blocks) {
  std::vector<LayerEpsilon> out;
  const double lambda = budget.lambda_split;
  for (std::int64_t i = 0; i <= num_blocks; ++i) {
    out.push_back({static_cast<int>(i),
                   (lambda / static_cast<double>(i + 1) + (1.0 - lambda)) *
                       budget.epsilon});
  }
  return out;
}

absl::StatusOr<CalibrationReport> CalibrateStrategy1(
    const DpBudget& budget, const CalibrationInputs& inputs) {
  if (auto s = budget.Validate(); !s.ok()) return s;
  if (auto s = inputs.Validate(); !s.ok()) return s;
  CalibrationReport report;
  report.budget = budget;
  report.inputs = inputs;
  report.alpha = CalibrationAlpha(budget);
  const double factor = Strategy1Factor(budget, inputs);
  report.pi_min = inputs.input_bound * factor;
  report.gamma_min = inputs.residual_bound * factor;
  report.per_layer_epsilons = PerLayerEpsilons(budget, inputs.num_blocks);
  report.whole_model_epsilon = budget.epsilon;
  report.delta = budget.delta;
  return report;
}

absl::StatusOr<double> AchievedEpsilonStrategy1(
    double gamma, double pi, double delta, double lambda_split,
    const CalibrationInputs& inputs) {
  if (!(gamma > 0.0) || !(pi > 0.0)) {
    return absl::InvalidArgumentError("gamma and pi must be positive");
  }
  if (auto s = CheckDelta(delta); !s.ok()) return s;
  if (auto s = CheckLambda(lambda_split); !s.ok()) return s;
  if (auto s = inputs.Validate(); !s.ok()) return s;
  auto feasible = [&](double eps) {
    const DpBudget budget{eps, delta, lambda_split};
    const double factor = Strategy1Factor(budget, inputs);
    return inputs.residual_bound * factor <= gamma &&
           inputs.input_bound * factor <= pi;
  };
  double lo = kMinEpsilon, hi = kMaxEpsilon;
  if (feasible(lo)) return lo;
  if (!feasible(hi)) {
    return absl::OutOfRangeError(absl::StrCat(
        "noise gamma=", gamma, " pi=", pi, " cannot reach any epsilon <= ",
        kMaxEpsilon));
  }
  while (hi / lo - 1.0 > 1e-9) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

absl::StatusOr<Strategy2Calibration> CalibrateStrategy2(
    const DpBudget& budget, const CalibrationInputs& inputs) {
  if (auto s = budget.Validate(); !s.ok()) return s;
  if (auto s = inputs.Validate(); !s.ok()) return s;
  Strategy2Calibration out;
  out.alpha = CalibrationAlpha(budget);
  const double factor =
      std::sqrt(2.0 * out.alpha * static_cast<double>(inputs.num_blocks) /
                (budget.lambda_split * budget.epsilon));
  out.gamma_min = inputs.activation_bound / inputs.eta * factor;
  out.pi_min = inputs.head_bound * factor;
  return out;
}

absl::StatusOr<OrderSearchResult> BestOrderEpsilonStrategy1(
    double gamma, double pi, double delta, const CalibrationInputs& inputs,
    double max_alpha, int grid_points) {
  if (!(gamma > 0.0) || !(pi > 0.0)) {
    return absl::InvalidArgumentError("gamma and pi must be positive");
  }
  if (auto s = CheckDelta(delta); !s.ok()) return s;
  if (auto s = inputs.Validate(); !s.ok()) return s;
  if (!(max_alpha > 1.0) || grid_points < 1) {
    return absl::InvalidArgumentError("need max_alpha > 1 and a nonempty grid");
  }
  const double p = static_cast<double>(inputs.Participations());
  const double ratio =
      std::max(std::pow(inputs.input_bound / pi, 2),
               std::pow(inputs.residual_bound / gamma, 2));
  OrderSearchResult best{std::numeric_limits<double>::infinity(), 0.0};
  // Geometric grid on alpha - 1 in [1e-3, max_alpha - 1].
  const double lo = std::log(1e-3), hi = std::log(max_alpha - 1.0);
  for (int g = 0; g < grid_points; ++g) {
    const double t = grid_points == 1 ? 1.0 : static_cast<double>(g) /
                                                  (grid_points - 1);
    const double alpha = 1.0 + std::exp(lo + t * (hi - lo));
    const double eps =
        2.0 * p * alpha * ratio + std::log(1.0 / delta) / (alpha - 1.0);
    if (eps < best.epsilon) best = {eps, alpha};
  }
  return best;
}

double ClopperPearsonUpper(std::int64_t successes, std::int64_t trials,
                           double confidence) {
  if (successes >= trials) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(successes + 1),
                                static_cast<double>(trials - successes),
                                confidence);
}

double EpsilonLowerBoundFromRates(double fpr_hi, double fnr_hi, double delta) {
  double best = 0.0;
  auto term = [&](double num, double den) {
    num = 1.0 - delta - num;
    if (num <= 0.0) return;
    if (den <= 0.0) {
      best = std::numeric_limits<double>::infinity();
      return;
    }
    best = std::max(best, std::log(num / den));
  };
  term(fnr_hi, fpr_hi);
  term(fpr_hi, fnr_hi);
  return best;
}

absl::StatusOr<double> EmpiricalEpsilonLowerBound(const AttackOutcomes& o,
                                                  double delta,
                                                  double confidence) {
  if (o.negatives < 1 || o.positives < 1) {
    return absl::InvalidArgumentError("trial counts must be at least 1");
  }
  if (o.false_positives < 0 || o.false_positives > o.negatives ||
      o.false_negatives < 0 || o.false_negatives > o.positives) {
    return absl::InvalidArgumentError("error counts exceed trial counts");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1)");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    return absl::InvalidArgumentError("confidence must lie in (0, 1)");
  }
  const double fpr_hi =
      ClopperPearsonUpper(o.false_positives, o.negatives, confidence);
  const double fnr_hi =
      ClopperPearsonUpper(o.false_negatives, o.positives, confidence);
  return EpsilonLowerBoundFromRates(fpr_hi, fnr_hi, delta);
}

std::string RenderCalibrationReport(const CalibrationReport& r) {
  std::string out;
  auto line = [&](absl::string_view key, auto value) {
    if constexpr (std::is_floating_point_v<decltype(value)>) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", value);
      absl::StrAppend(&out, key, "=", buf, "\n");
    } else {
      absl::StrAppend(&out, key, "=", value, "\n");
    }
  };
  line("strategy", "additive");
  line("epsilon", r.budget.epsilon);
  line("delta", r.budget.delta);
  line("lambda", r.budget.lambda_split);
  line("T", r.inputs.iterations);
  line("b", r.inputs.batch_size);
  line("N", r.inputs.train_size);
  line("M", r.inputs.num_blocks);
  line("R", r.inputs.input_bound);
  line("G", r.inputs.residual_bound);
  line("participations", r.inputs.Participations());
  line("alpha", r.alpha);
  line("pi_min", r.pi_min);
  line("gamma_min", r.gamma_min);
  for (const LayerEpsilon& l : r.per_layer_epsilons) {
    line(absl::StrCat("layer_epsilon.", l.layer), l.epsilon);
  }
  line("whole_model_epsilon", r.whole_model_epsilon);
  return out;
}

}  // namespace rp::dp
