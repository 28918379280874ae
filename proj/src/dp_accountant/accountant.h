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

#ifndef RP_DP_ACCOUNTANT_ACCOUNTANT_H_
#define RP_DP_ACCOUNTANT_ACCOUNTANT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace rp::dp {

// (alpha, eps)-Renyi differential privacy.
struct RdpPoint {
  double alpha = 2.0;
  double eps_rdp = 0.0;
};

// Target (epsilon, delta) and the split lambda between the Renyi term and
// the conversion term.
struct DpBudget {
  double epsilon = 1.0;
  double delta = 1e-5;
  double lambda_split = 0.5;

  absl::Status Validate() const;
};

// Problem constants entering the noise calibration.
struct CalibrationInputs {
  std::int64_t iterations = 1;  // T
  std::int64_t batch_size = 1;  // b
  std::int64_t train_size = 1;  // N
  std::int64_t num_blocks = 1;  // M
  double input_bound = 1.0;     // R
  double residual_bound = 1.0;  // G
  double activation_bound = 1.0;  // B
  double eta = 0.1;
  double head_bound = 1.0;  // a

  absl::Status Validate() const;
  // ceil(T * b / N): how many updates see a given example.
  std::int64_t Participations() const;
};

struct LayerEpsilon {
  int layer = 0;
  double epsilon = 0.0;
};

struct CalibrationReport {
  DpBudget budget;
  CalibrationInputs inputs;
  double alpha = 0.0;
  double pi_min = 0.0;
  double gamma_min = 0.0;
  // Layers 0..M-1 are the residual weights U^i, layer M is the head.
  std::vector<LayerEpsilon> per_layer_epsilons;
  double whole_model_epsilon = 0.0;
  double delta = 0.0;
};

struct Strategy2Calibration {
  double gamma_min = 0.0;
  double pi_min = 0.0;
  double alpha = 0.0;
};

// alpha * sensitivity^2 / (2 sigma^2).
absl::StatusOr<RdpPoint> GaussianRdp(double alpha, double sensitivity,
                                     double sigma);

// Sum of the components; all orders must match.
absl::StatusOr<RdpPoint> RdpCompose(std::span<const RdpPoint> points);

// eps_rdp + log(1/delta) / (alpha - 1).
absl::StatusOr<double> RdpToDp(const RdpPoint& point, double delta);

// alpha = log(1/delta) / ((1 - lambda) eps) + 1 shared by both strategies.
double CalibrationAlpha(const DpBudget& budget);

// Residual layer i gets (lambda / (i + 1) + 1 - lambda) eps, i = 0..M.
std::vector<LayerEpsilon> PerLayerEpsilons(const DpBudget& budget,
                                           std::int64_t num_blocks);

// Minimal additive-strategy noise for the budget:
//   pi_min = R sqrt(2 P alpha / (lambda eps)), gamma_min = G sqrt(...).
absl::StatusOr<CalibrationReport> CalibrateStrategy1(
    const DpBudget& budget, const CalibrationInputs& inputs);

// Smallest eps whose additive calibration is met by (gamma, pi), by
// log-space bisection on [kMinEpsilon, kMaxEpsilon] to relative tolerance
// 1e-9. Fails with kOutOfRange when no eps up to kMaxEpsilon is feasible.
inline constexpr double kMinEpsilon = 1e-12;
inline constexpr double kMaxEpsilon = 1e9;
absl::StatusOr<double> AchievedEpsilonStrategy1(
    double gamma, double pi, double delta, double lambda_split,
    const CalibrationInputs& inputs);

// Multiplicative strategy:
//   gamma_min = (B / eta) sqrt(2 alpha M / (lambda eps)),
//   pi_min = a sqrt(2 alpha M / (lambda eps)).
absl::StatusOr<Strategy2Calibration> CalibrateStrategy2(
    const DpBudget& budget, const CalibrationInputs& inputs);

// Extension: the additive-strategy noise (gamma, pi) composed over P
// participations has Renyi divergence 2 P alpha max(R^2/pi^2, G^2/gamma^2)
// at every order; this returns the smallest converted eps over a grid of
// orders in (1, max_alpha].
struct OrderSearchResult {
  double epsilon = 0.0;
  double alpha = 0.0;
};
absl::StatusOr<OrderSearchResult> BestOrderEpsilonStrategy1(
    double gamma, double pi, double delta, const CalibrationInputs& inputs,
    double max_alpha = 256.0, int grid_points = 4000);

// Outcomes of a membership attack used as a distinguishing test.
struct AttackOutcomes {
  std::int64_t false_positives = 0;
  std::int64_t negatives = 0;  // non-member trials
  std::int64_t false_negatives = 0;
  std::int64_t positives = 0;  // member trials
};

// One-sided Clopper-Pearson upper confidence bound for a binomial rate.
double ClopperPearsonUpper(std::int64_t successes, std::int64_t trials,
                           double confidence);

// Empirical epsilon lower bound from attack error rates:
//   max(0, log((1 - delta - FNR_hi) / FPR_hi), log((1 - delta - FPR_hi) /
//   FNR_hi)) with Clopper-Pearson upper bounds FPR_hi, FNR_hi.
absl::StatusOr<double> EmpiricalEpsilonLowerBound(const AttackOutcomes& outcomes,
                                                  double delta,
                                                  double confidence = 0.95);
// Same formula on given rate bounds.
double EpsilonLowerBoundFromRates(double fpr_hi, double fnr_hi, double delta);

// Text record (key=value per line) echoing every input.
std::string RenderCalibrationReport(const CalibrationReport& report);

}  // namespace rp::dp

#endif  // RP_DP_ACCOUNTANT_ACCOUNTANT_H_
