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

#include "rademacher/complexity.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

#include "absl/strings/str_cat.h"
#include "nn_core/format.h"
#include "nn_core/rng.h"
#include "rademacher/spectral.h"

namespace rp::rademacher {
namespace {

constexpr std::uint64_t kChunkDraws = 1 << 14;

// Welford accumulator; Merge uses the pairwise update of Chan et al.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void Add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  void Merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    const double n = na + nb;
    mean += delta * nb / n;
    m2 += o.m2 + delta * delta * na * nb / n;
    count += o.count;
  }
};

// Runs `chunk(c)` for c in [0, chunks) on up to `threads` workers and sums
// the results in chunk order.
Moments RunChunks(std::uint64_t chunks, int threads,
                  const std::function<Moments(std::uint64_t)>& chunk) {
  std::vector<Moments> parts(chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (std::uint64_t c = next++; c < chunks; c = next++) parts[c] = chunk(c);
  };
  const int workers = static_cast<int>(
      std::min<std::uint64_t>(std::max(threads, 1), std::max<std::uint64_t>(
                                                        chunks, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  Moments total;
  for (const Moments& m : parts) total.Merge(m);
  return total;
}

// Mean and standard error of the mean.
std::pair<double, double> MeanAndError(const Moments& m) {
  const double n = static_cast<double>(m.count);
  const double var = m.count > 1 ? m.m2 / (n - 1) : 0.0;
  return {m.mean, std::sqrt(var / n)};
}

double Norm(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

}  // namespace

absl::StatusOr<SampleSet> SampleSet::Create(
    std::vector<std::vector<double>> samples) {
  if (samples.empty()) return absl::InvalidArgumentError("no samples");
  const std::size_t d = samples.front().size();
  if (d == 0) return absl::InvalidArgumentError("samples have no coordinates");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != d) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", i, " has dimension ", samples[i].size(),
                       ", expected ", d));
    }
    for (double v : samples[i]) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "sample ", i, " has a non-positive or non-finite coordinate"));
      }
    }
  }
  SampleSet set;
  set.samples_ = std::move(samples);
  return set;
}

absl::StatusOr<SampleSet> SampleSet::Random(std::size_t n, std::size_t d,
                                            double lo, double hi,
                                            std::uint64_t seed) {
  if (!(lo > 0.0) || !(hi > lo)) {
    return absl::InvalidArgumentError("need 0 < lo < hi");
  }
  nn::Rng rng(seed);
  std::vector<std::vector<double>> samples(n, std::vector<double>(d));
  for (auto& s : samples) {
    for (double& v : s) v = rng.Uniform(lo, hi);
  }
  return Create(std::move(samples));
}

std::vector<std::vector<double>> SampleSet::Powered(double p) const {
  std::vector<std::vector<double>> out = samples_;
  for (auto& s : out) {
    for (double& v : s) v = std::pow(v, p);
  }
  return out;
}

absl::Status ComplexityParams::Validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    return absl::InvalidArgumentError("c must be finite and >= 0");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    return absl::InvalidArgumentError("T must be finite and >= 0");
  }
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError("p must lie in (0, 1)");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError("gamma must be finite and >= 0");
  }
  return absl::OkStatus();
}

absl::string_view EstimateMethodName(EstimateMethod method) {
  switch (method) {
    case EstimateMethod::kClosedFormEnumerated:
      return "closed_form_enumerated";
    case EstimateMethod::kClosedFormMonteCarlo:
      return "closed_form_mc";
    case EstimateMethod::kRandomSearchOracle:
      return "random_search_oracle";
  }
  return "unknown";
}

absl::StatusOr<ComplexityEstimate> SigmaExpectation(
    const SampleSet& samples, double p, const ExpectationOptions& options) {
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError("p must lie in (0, 1)");
  }
  const auto powered = samples.Powered(p);
  const std::size_t n = samples.size();
  const std::size_t d = samples.dim();
  ComplexityEstimate out;
  if (n <= kMaxEnumeratedSamples && !options.force_monte_carlo) {
    // sigma and -sigma give the same norm, so fix sigma_0 = +1.
    const std::uint64_t half = std::uint64_t{1} << (n - 1);
    std::vector<double> sum(d);
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < half; ++mask) {
      std::copy(powered[0].begin(), powered[0].end(), sum.begin());
      for (std::size_t i = 1; i < n; ++i) {
        const double sign = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < d; ++j) sum[j] += sign * powered[i][j];
      }
      total += Norm(sum);
    }
    out.value = total / static_cast<double>(half);
    out.method = EstimateMethod::kClosedFormEnumerated;
    return out;
  }
  if (options.mc_draws < 2) {
    return absl::InvalidArgumentError("need at least 2 Monte-Carlo draws");
  }
  const std::uint64_t draws = options.mc_draws;
  const std::uint64_t chunks = (draws + kChunkDraws - 1) / kChunkDraws;
  const Moments m = RunChunks(chunks, options.threads, [&](std::uint64_t c) {
    nn::Rng rng(nn::Rng::DeriveSeed(options.seed, c));
    const std::uint64_t begin = c * kChunkDraws;
    const std::uint64_t end = std::min(draws, begin + kChunkDraws);
    Moments part;
    std::vector<double> sum(d);
    for (std::uint64_t k = begin; k < end; ++k) {
      std::fill(sum.begin(), sum.end(), 0.0);
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) bits = rng.Bits();
        const double sign = (bits >> (i % 64)) & 1 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < d; ++j) sum[j] += sign * powered[i][j];
      }
      part.Add(Norm(sum));
    }
    return part;
  });
  const auto [mean, se] = MeanAndError(m);
  out.value = mean;
  out.std_error = se;
  out.method = EstimateMethod::kClosedFormMonteCarlo;
  return out;
}

double NoiseDampingFactor(const ComplexityParams& params) {
  return std::exp(-params.p * (1.0 - params.p) * params.gamma * params.gamma *
                  params.horizon / 2.0);
}

ComplexityEstimate ComplexityOde(const ComplexityEstimate& sigma_expectation,
                                 std::size_t n,
                                 const ComplexityParams& params) {
  const double scale = params.c / static_cast<double>(n) *
                       std::exp(params.c * params.horizon * params.p);
  ComplexityEstimate out = sigma_expectation;
  out.value *= scale;
  out.std_error *= scale;
  return out;
}

ComplexityEstimate ComplexitySde(const ComplexityEstimate& sigma_expectation,
                                 std::size_t n,
                                 const ComplexityParams& params) {
  ComplexityEstimate out = ComplexityOde(sigma_expectation, n, params);
  const double factor = NoiseDampingFactor(params);
  out.value *= factor;
  out.std_error *= factor;
  return out;
}

absl::StatusOr<ComplexityEstimate> ComplexityOde(
    const SampleSet& samples, const ComplexityParams& params,
    const ExpectationOptions& options) {
  if (auto s = params.Validate(); !s.ok()) return s;
  auto e = SigmaExpectation(samples, params.p, options);
  if (!e.ok()) return e.status();
  return ComplexityOde(*e, samples.size(), params);
}

absl::StatusOr<ComplexityEstimate> ComplexitySde(
    const SampleSet& samples, const ComplexityParams& params,
    const ExpectationOptions& options) {
  if (auto s = params.Validate(); !s.ok()) return s;
  auto e = SigmaExpectation(samples, params.p, options);
  if (!e.ok()) return e.status();
  return ComplexitySde(*e, samples.size(), params);
}

absl::Status GbmParams::Validate() const {
  if (!(x0 > 0.0) || !std::isfinite(x0)) {
    return absl::InvalidArgumentError("x0 must be positive");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    return absl::InvalidArgumentError("T must be >= 0");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError("p must lie in (0, 1]");
  }
  if (!std::isfinite(lambda) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError("lambda and gamma must be finite");
  }
  return absl::OkStatus();
}

double GbmMomentClosedForm(const GbmParams& g) {
  return std::pow(g.x0, g.p) *
         std::exp(g.p * g.lambda * g.horizon -
                  g.p * (1.0 - g.p) * g.gamma * g.gamma * g.horizon / 2.0);
}

absl::StatusOr<GbmMomentResult> GbmMomentOracle(const GbmParams& params,
                                                std::uint64_t paths,
                                                std::uint64_t seed, int steps,
                                                int threads) {
  if (auto s = params.Validate(); !s.ok()) return s;
  if (paths < 1000) return absl::InvalidArgumentError("need >= 1000 paths");
  if (steps < 1) return absl::InvalidArgumentError("need >= 1 step");
  const double x0p = std::pow(params.x0, params.p);
  const double drift = (params.lambda - 0.5 * params.gamma * params.gamma) *
                       params.horizon;
  const double dt_sqrt = std::sqrt(params.horizon / steps);
  const std::uint64_t chunks = (paths + kChunkDraws - 1) / kChunkDraws;
  const Moments m = RunChunks(chunks, threads, [&](std::uint64_t c) {
    nn::Rng rng(nn::Rng::DeriveSeed(seed, c));
    const std::uint64_t begin = c * kChunkDraws;
    const std::uint64_t end = std::min(paths, begin + kChunkDraws);
    Moments part;
    for (std::uint64_t k = begin; k < end; ++k) {
      double brownian = 0.0;
      for (int s = 0; s < steps; ++s) brownian += dt_sqrt * rng.Normal();
      part.Add(x0p * std::exp(params.p * (drift + params.gamma * brownian)));
    }
    return part;
  });
  GbmMomentResult out;
  std::tie(out.mc_estimate, out.std_error) = MeanAndError(m);
  out.closed_form = GbmMomentClosedForm(params);
  const double diff = out.mc_estimate - out.closed_form;
  if (out.std_error > 0.0) {
    out.z_score = diff / out.std_error;
  } else if (std::abs(diff) <= 1e-12 * std::max(1.0, out.closed_form)) {
    out.z_score = 0.0;
  } else {
    out.z_score = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return out;
}

namespace {

absl::StatusOr<std::vector<double>> SignedSum(const SampleSet& samples,
                                              std::span<const int> signs,
                                              double p) {
  if (signs.size() != samples.size()) {
    return absl::InvalidArgumentError("one sign per sample required");
  }
  const auto powered = samples.Powered(p);
  std::vector<double> sum(samples.dim());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) {
      return absl::InvalidArgumentError("signs must be +1 or -1");
    }
    for (std::size_t j = 0; j < sum.size(); ++j) {
      sum[j] += signs[i] * powered[i][j];
    }
  }
  return sum;
}

}  // namespace

double SupClosedForm(const SampleSet& samples, std::span<const int> signs,
                     const ComplexityParams& params) {
  auto sum = SignedSum(samples, signs, params.p);
  if (!sum.ok()) return std::numeric_limits<double>::quiet_NaN();
  return params.c * std::exp(params.c * params.horizon * params.p) *
         Norm(*sum);
}

absl::StatusOr<SupOracleResult> SupRandomSearchOracle(
    const SampleSet& samples, std::span<const int> signs,
    const ComplexityParams& params, int trials, std::uint64_t seed) {
  if (auto s = params.Validate(); !s.ok()) return s;
  if (trials < 1) return absl::InvalidArgumentError("need >= 1 trial");
  auto sum = SignedSum(samples, signs, params.p);
  if (!sum.ok()) return sum.status();
  const std::size_t d = samples.dim();
  std::vector<double> zero_row(d, 0.0);
  auto basis = DftEigenDecompose(std::span<const double>(zero_row));
  if (!basis.ok()) return basis.status();
  std::vector<Complex> s_complex(sum->begin(), sum->end());
  const std::vector<Complex> s_hat = ToSpectral(*basis, s_complex);

  nn::Rng rng(seed);
  SupOracleResult out;
  out.closed_form = SupClosedForm(samples, signs, params);
  std::vector<Complex> lambda(d), scaled(d);
  for (int t = 0; t < trials; ++t) {
    // Eigenvalues of a real circulant come in conjugate pairs
    // lambda_k = conj(lambda_{d-k}); k = 0 and k = d/2 are real.
    for (std::size_t k = 0; k <= d / 2; ++k) {
      const std::size_t mirror = (d - k) % d;
      if (k == mirror) {
        lambda[k] = Complex(rng.Uniform(-params.c, params.c), 0.0);
      } else {
        const double r = params.c * std::sqrt(rng.Uniform());
        const double theta = rng.Uniform(0.0, 2.0 * std::numbers::pi);
        lambda[k] = std::polar(r, theta);
        lambda[mirror] = std::conj(lambda[k]);
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      scaled[k] = std::exp(params.p * params.horizon * lambda[k]) * s_hat[k];
    }
    const std::vector<Complex> v = FromSpectral(*basis, scaled);
    double sq = 0.0;
    for (const Complex& z : v) sq += z.real() * z.real();
    // The best unit-bounded w is c v / ||v||, giving c ||v||.
    out.best = std::max(out.best, params.c * std::sqrt(sq));
  }
  return out;
}

std::vector<GbmParams> DefaultGbmGrid() {
  return {
      {1.0, 0.3, 0.8, 1.0, 0.5},   {1.0, 0.0, 0.5, 1.0, 0.5},
      {2.0, -0.5, 0.3, 2.0, 0.3},  {0.5, 1.0, 1.0, 0.5, 0.7},
      {1.0, 0.2, 0.2, 3.0, 0.9},   {3.0, 0.1, 0.6, 1.5, 0.2},
      {1.0, -1.0, 0.4, 1.0, 0.6},  {0.8, 0.5, 1.2, 0.8, 0.4},
      {1.5, 0.0, 0.0, 1.0, 0.5},   {1.0, 0.7, 0.9, 2.0, 0.8},
  };
}

absl::StatusOr<ComplexityReport> BuildComplexityReport(
    const SampleSet& samples, const ComplexityParams& params,
    const ExpectationOptions& options, std::uint64_t gbm_paths) {
  if (auto s = params.Validate(); !s.ok()) return s;
  ComplexityReport r;
  r.params = params;
  r.n = samples.size();
  r.d = samples.dim();
  auto e = SigmaExpectation(samples, params.p, options);
  if (!e.ok()) return e.status();
  r.sigma_expectation = *e;
  r.f = ComplexityOde(*e, r.n, params);
  r.g = ComplexitySde(*e, r.n, params);
  r.ratio = r.f.value > 0.0 ? r.g.value / r.f.value : 1.0;
  if (gbm_paths > 0) {
    const auto grid = DefaultGbmGrid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto g = GbmMomentOracle(grid[i], gbm_paths,
                               nn::Rng::DeriveSeed(options.seed, 1000 + i),
                               16, options.threads);
      if (!g.ok()) return g.status();
      r.gbm_z_scores.push_back(g->z_score);
    }
  }
  return r;
}

std::string RenderComplexityReport(const ComplexityReport& r) {
  using nn::FormatDouble;
  std::string out;
  absl::StrAppend(&out, "n=", r.n, "\n", "d=", r.d, "\n");
  absl::StrAppend(&out, "c=", FormatDouble(r.params.c), "\n");
  absl::StrAppend(&out, "T=", FormatDouble(r.params.horizon), "\n");
  absl::StrAppend(&out, "p=", FormatDouble(r.params.p), "\n");
  absl::StrAppend(&out, "gamma=", FormatDouble(r.params.gamma), "\n");
  absl::StrAppend(&out, "method=",
                  EstimateMethodName(r.sigma_expectation.method), "\n");
  absl::StrAppend(&out, "sigma_expectation=",
                  FormatDouble(r.sigma_expectation.value), "\n");
  absl::StrAppend(&out, "sigma_expectation_se=",
                  FormatDouble(r.sigma_expectation.std_error), "\n");
  absl::StrAppend(&out, "complexity_f=", FormatDouble(r.f.value), "\n");
  absl::StrAppend(&out, "complexity_g=", FormatDouble(r.g.value), "\n");
  absl::StrAppend(&out, "ratio=", FormatDouble(r.ratio), "\n");
  for (std::size_t i = 0; i < r.gbm_z_scores.size(); ++i) {
    absl::StrAppend(&out, "gbm_z_", i, "=", FormatDouble(r.gbm_z_scores[i]),
                    "\n");
  }
  return out;
}

std::string ComplexityCsvHeader() {
  return "n,d,c,T,p,gamma,method,sigma_expectation,sigma_expectation_se,"
         "complexity_f,complexity_g,ratio,max_abs_gbm_z";
}

std::string ComplexityCsvRow(const ComplexityReport& r) {
  using nn::FormatDouble;
  double max_z = 0.0;
  for (double z : r.gbm_z_scores) max_z = std::max(max_z, std::abs(z));
  return absl::StrCat(
      r.n, ",", r.d, ",", FormatDouble(r.params.c), ",",
      FormatDouble(r.params.horizon), ",", FormatDouble(r.params.p), ",",
      FormatDouble(r.params.gamma), ",",
      EstimateMethodName(r.sigma_expectation.method), ",",
      FormatDouble(r.sigma_expectation.value), ",",
      FormatDouble(r.sigma_expectation.std_error), ",",
      FormatDouble(r.f.value), ",", FormatDouble(r.g.value), ",",
      FormatDouble(r.ratio), ",", FormatDouble(max_z));
}

}  // namespace rp::rademacher
