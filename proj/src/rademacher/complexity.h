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

#ifndef RP_RADEMACHER_COMPLEXITY_H_
#define RP_RADEMACHER_COMPLEXITY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace rp::rademacher {

// N strictly positive vectors in R^d.
class SampleSet {
 public:
  static absl::StatusOr<SampleSet> Create(
      std::vector<std::vector<double>> samples);
  // N samples with coordinates uniform on [lo, hi], 0 < lo < hi.
  static absl::StatusOr<SampleSet> Random(std::size_t n, std::size_t d,
                                          double lo, double hi,
                                          std::uint64_t seed);

  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return samples_.front().size(); }
  const std::vector<double>& sample(std::size_t i) const {
    return samples_[i];
  }
  // Elementwise x_i^p.
  std::vector<std::vector<double>> Powered(double p) const;

 private:
  std::vector<std::vector<double>> samples_;
};

// Function-class constants: ||w||, ||U|| <= c, horizon T, exponent p, noise
// level gamma.
struct ComplexityParams {
  double c = 1.0;
  double horizon = 1.0;
  double p = 0.5;
  double gamma = 0.0;

  absl::Status Validate() const;
};

enum class EstimateMethod {
  kClosedFormEnumerated,
  kClosedFormMonteCarlo,
  kRandomSearchOracle
};
absl::string_view EstimateMethodName(EstimateMethod method);

struct ComplexityEstimate {
  double value = 0.0;
  EstimateMethod method = EstimateMethod::kClosedFormEnumerated;
  double std_error = 0.0;
};

// Largest N evaluated by exhaustive enumeration of sign vectors.
inline constexpr std::size_t kMaxEnumeratedSamples = 20;

struct ExpectationOptions {
  std::uint64_t mc_draws = 1'000'000;
  std::uint64_t seed = 0;
  int threads = 1;
  // Use Monte Carlo even when enumeration is possible.
  bool force_monte_carlo = false;
};

// E_sigma || sum_i sigma_i x_i^p ||_2 over uniform random signs. Exact for
// N <= kMaxEnumeratedSamples unless Monte Carlo is forced. Monte-Carlo draws
// are processed in fixed chunks with seeds derived from options.seed, so the
// estimate does not depend on options.threads.
absl::StatusOr<ComplexityEstimate> SigmaExpectation(
    const SampleSet& samples, double p, const ExpectationOptions& options);

// Rademacher complexity of the deterministic class:
// (c / N) exp(c T p) E_sigma.
ComplexityEstimate ComplexityOde(const ComplexityEstimate& sigma_expectation,
                                 std::size_t n, const ComplexityParams& params);
// Noisy class: the deterministic value times exp(-p (1 - p) gamma^2 T / 2).
ComplexityEstimate ComplexitySde(const ComplexityEstimate& sigma_expectation,
                                 std::size_t n, const ComplexityParams& params);
// exp(-p (1 - p) gamma^2 T / 2).
double NoiseDampingFactor(const ComplexityParams& params);

absl::StatusOr<ComplexityEstimate> ComplexityOde(
    const SampleSet& samples, const ComplexityParams& params,
    const ExpectationOptions& options);
absl::StatusOr<ComplexityEstimate> ComplexitySde(
    const SampleSet& samples, const ComplexityParams& params,
    const ExpectationOptions& options);

struct GbmMomentResult {
  double mc_estimate = 0.0;
  double closed_form = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
};

struct GbmParams {
  double x0 = 1.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double horizon = 1.0;
  double p = 0.5;

  absl::Status Validate() const;
};

// x0^p exp(p lambda T - p (1 - p) gamma^2 T / 2).
double GbmMomentClosedForm(const GbmParams& params);

// Simulates y(T) = x0 exp((lambda - gamma^2/2) T + gamma B(T)) with B built
// from `steps` Brownian increments and compares the sample mean of y(T)^p
// with the closed form. Independent of `threads`.
absl::StatusOr<GbmMomentResult> GbmMomentOracle(const GbmParams& params,
                                                std::uint64_t paths,
                                                std::uint64_t seed,
                                                int steps = 16,
                                                int threads = 1);

// Best value of sum_i sigma_i w . x_i^p(T) found by random search over real
// circulant U with eigenvalues |lambda_k| <= c, where x^p(T) = exp(p U T) x^p
// and w = c v / ||v|| is the exact maximizer for each sampled U.
struct SupOracleResult {
  double best = 0.0;
  double closed_form = 0.0;
};
absl::StatusOr<SupOracleResult> SupRandomSearchOracle(
    const SampleSet& samples, std::span<const int> signs,
    const ComplexityParams& params, int trials, std::uint64_t seed);

// c exp(c T p) || sum_i sigma_i x_i^p ||_2.
double SupClosedForm(const SampleSet& samples, std::span<const int> signs,
                     const ComplexityParams& params);

struct ComplexityReport {
  ComplexityParams params;
  std::size_t n = 0;
  std::size_t d = 0;
  ComplexityEstimate sigma_expectation;
  ComplexityEstimate f;
  ComplexityEstimate g;
  double ratio = 0.0;
  std::vector<double> gbm_z_scores;
};

// Ten fixed GBM parameter sets spanning drift, volatility, horizon and p.
std::vector<GbmParams> DefaultGbmGrid();

// Computes the sigma expectation once, derives both complexities from it,
// and runs the GBM oracle on DefaultGbmGrid() with `gbm_paths` paths each
// (skipped when zero).
absl::StatusOr<ComplexityReport> BuildComplexityReport(
    const SampleSet& samples, const ComplexityParams& params,
    const ExpectationOptions& options, std::uint64_t gbm_paths);

// key=value lines.
std::string RenderComplexityReport(const ComplexityReport& report);
std::string ComplexityCsvHeader();
std::string ComplexityCsvRow(const ComplexityReport& report);

}  // namespace rp::rademacher

#endif  // RP_RADEMACHER_COMPLEXITY_H_
