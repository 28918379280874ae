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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "nn_core/rng.h"

namespace rp::rademacher {
namespace {

// Independent oracle: all 2^N sign vectors, no symmetry reduction.
double BruteForceExpectation(const SampleSet& s, double p) {
  const std::size_t n = s.size(), d = s.dim();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += ((mask >> i) & 1 ? -1.0 : 1.0) * std::pow(s.sample(i)[j], p);
      }
      sq += acc * acc;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(std::uint64_t{1} << n);
}

TEST(SampleSetTest, RejectsNonPositive) {
  EXPECT_FALSE(SampleSet::Create({{1.0, 0.0}}).ok());
  EXPECT_FALSE(SampleSet::Create({{1.0, -2.0}}).ok());
  EXPECT_FALSE(SampleSet::Create({{1.0}, {1.0, 2.0}}).ok());
  EXPECT_FALSE(SampleSet::Create({}).ok());
  EXPECT_TRUE(SampleSet::Create({{1e-300}}).ok());
}

TEST(SigmaExpectationTest, SingleSampleIsItsNorm) {
  auto s = SampleSet::Create({{4.0, 9.0}});
  auto e = SigmaExpectation(*s, 0.5, {});
  ASSERT_TRUE(e.ok());
  EXPECT_DOUBLE_EQ(e->value, std::sqrt(4.0 + 9.0));
  EXPECT_EQ(e->std_error, 0.0);
  EXPECT_EQ(e->method, EstimateMethod::kClosedFormEnumerated);
}

TEST(SigmaExpectationTest, DuplicatePairCancels) {
  auto s = SampleSet::Create({{4.0, 9.0}, {4.0, 9.0}});
  auto e = SigmaExpectation(*s, 0.5, {});
  EXPECT_DOUBLE_EQ(e->value, std::sqrt(13.0));
}

TEST(SigmaExpectationTest, EnumerationMatchesBruteForce) {
  for (std::size_t n = 1; n <= 12; ++n) {
    auto s = SampleSet::Random(n, 3, 0.1, 2.0, n);
    ASSERT_TRUE(s.ok());
    auto e = SigmaExpectation(*s, 0.4, {});
    ASSERT_TRUE(e.ok());
    EXPECT_NEAR(e->value, BruteForceExpectation(*s, 0.4),
                1e-12 * e->value);
  }
}

TEST(SigmaExpectationTest, MonteCarloWithinThreeStandardErrors) {
  auto s = SampleSet::Random(12, 4, 0.1, 3.0, 42);
  ExpectationOptions exact;
  ExpectationOptions mc;
  mc.force_monte_carlo = true;
  mc.mc_draws = 1'000'000;
  mc.seed = 3;
  auto e = SigmaExpectation(*s, 0.5, exact);
  auto m = SigmaExpectation(*s, 0.5, mc);
  ASSERT_TRUE(e.ok() && m.ok());
  EXPECT_EQ(m->method, EstimateMethod::kClosedFormMonteCarlo);
  EXPECT_GT(m->std_error, 0.0);
  EXPECT_LE(std::abs(m->value - e->value), 3.0 * m->std_error);
}

TEST(SigmaExpectationTest, MonteCarloIndependentOfThreads) {
  auto s = SampleSet::Random(30, 2, 0.5, 1.5, 1);
  ExpectationOptions a;
  a.mc_draws = 100'000;
  a.seed = 11;
  ExpectationOptions b = a;
  b.threads = 4;
  auto ea = SigmaExpectation(*s, 0.5, a);
  auto eb = SigmaExpectation(*s, 0.5, b);
  ASSERT_TRUE(ea.ok() && eb.ok());
  EXPECT_EQ(ea->method, EstimateMethod::kClosedFormMonteCarlo);
  EXPECT_EQ(ea->value, eb->value);
  EXPECT_EQ(ea->std_error, eb->std_error);
}

TEST(SigmaExpectationTest, RejectsBadExponent) {
  auto s = SampleSet::Create({{1.0}});
  EXPECT_FALSE(SigmaExpectation(*s, 0.0, {}).ok());
  EXPECT_FALSE(SigmaExpectation(*s, 1.0, {}).ok());
}

TEST(ComplexityTest, UnitSampleZeroHorizon) {
  // x^p = (1,...,1)/sqrt(d) when x = d^(-1/(2p)).
  const std::size_t d = 4;
  const double p = 0.5;
  const double x = std::pow(static_cast<double>(d), -1.0 / (2.0 * p));
  auto s = SampleSet::Create({std::vector<double>(d, x)});
  ComplexityParams params{1.0, 0.0, p, 0.0};
  auto f = ComplexityOde(*s, params, {});
  ASSERT_TRUE(f.ok());
  EXPECT_NEAR(f->value, 1.0, 1e-15);
}

TEST(ComplexityTest, ShrinksWithCapacity) {
  auto s = SampleSet::Random(5, 3, 0.1, 1.0, 2);
  double previous = 1e300;
  for (double c : {1.0, 1e-2, 1e-4, 1e-8}) {
    auto f = ComplexityOde(*s, {c, 1.0, 0.5, 0.0}, {});
    EXPECT_LT(f->value, previous);
    previous = f->value;
  }
  EXPECT_LT(previous, 1e-7);
}

TEST(ComplexityTest, HorizonScalingLaw) {
  auto s = SampleSet::Random(6, 2, 0.1, 1.0, 3);
  const ComplexityParams base{0.7, 1.3, 0.4, 0.0};
  ComplexityParams doubled = base;
  doubled.horizon *= 2;
  auto f1 = ComplexityOde(*s, base, {});
  auto f2 = ComplexityOde(*s, doubled, {});
  EXPECT_NEAR(f2->value / f1->value, std::exp(0.7 * 1.3 * 0.4), 1e-14);
}

TEST(ComplexityTest, NoiseFreeSdeEqualsOde) {
  auto s = SampleSet::Random(6, 2, 0.1, 1.0, 4);
  auto f = ComplexityOde(*s, {1.0, 1.0, 0.5, 0.0}, {});
  auto g = ComplexitySde(*s, {1.0, 1.0, 0.5, 0.0}, {});
  EXPECT_EQ(f->value, g->value);
}

TEST(ComplexityTest, DampingFactorExample) {
  EXPECT_NEAR(NoiseDampingFactor({1.0, 2.0, 0.5, 1.0}), 0.778800783071405,
              1e-15);
  EXPECT_DOUBLE_EQ(NoiseDampingFactor({1.0, 2.0, 0.5, 1.0}),
                   std::exp(-0.25));
}

TEST(ComplexityTest, RatioIsExactAndBelowOne) {
  nn::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = SampleSet::Random(1 + rng.Index(14), 1 + rng.Index(5), 0.01,
                               5.0, trial);
    const ComplexityParams params{rng.Uniform(0.1, 2.0), rng.Uniform(0.1, 3.0),
                                  rng.Uniform(0.05, 0.95),
                                  rng.Uniform(0.01, 2.0)};
    ExpectationOptions options;
    options.force_monte_carlo = trial % 2 == 1;
    options.mc_draws = 20'000;
    auto r = BuildComplexityReport(*s, params, options, 0);
    ASSERT_TRUE(r.ok());
    const double expected =
        std::exp(-params.p * (1 - params.p) * params.gamma * params.gamma *
                 params.horizon / 2);
    EXPECT_NEAR(r->ratio, expected, 4 * std::numeric_limits<double>::epsilon());
    EXPECT_LT(r->g.value, r->f.value);
  }
}

TEST(GbmOracleTest, DeterministicPaths) {
  GbmParams g{2.0, 0.4, 0.0, 1.5, 0.3};
  auto r = GbmMomentOracle(g, 1000, 1);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->mc_estimate, std::pow(2.0, 0.3) * std::exp(0.3 * 0.4 * 1.5),
              1e-12);
  EXPECT_NEAR(r->closed_form, r->mc_estimate, 1e-12);
  EXPECT_EQ(r->z_score, 0.0);
}

TEST(GbmOracleTest, MeanIsMartingaleCorrected) {
  GbmParams g{1.0, 0.3, 0.5, 1.0, 0.999};
  auto r = GbmMomentOracle(g, 200'000, 2);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->mc_estimate, std::exp(0.3), 4 * r->std_error + 1e-3);
}

TEST(GbmOracleTest, ReferenceCase) {
  auto r = GbmMomentOracle({1.0, 0.3, 0.8, 1.0, 0.5}, 100'000, 3);
  ASSERT_TRUE(r.ok());
  EXPECT_LE(std::abs(r->z_score), 3.0);
}

TEST(GbmOracleTest, GridAndThreadIndependence) {
  for (const GbmParams& g : DefaultGbmGrid()) {
    auto one = GbmMomentOracle(g, 100'000, 4, 16, 1);
    auto many = GbmMomentOracle(g, 100'000, 4, 16, 3);
    ASSERT_TRUE(one.ok() && many.ok());
    EXPECT_LE(std::abs(one->z_score), 3.0);
    EXPECT_EQ(one->mc_estimate, many->mc_estimate);
  }
}

TEST(GbmOracleTest, RejectsBadInputs) {
  EXPECT_FALSE(GbmMomentOracle({0.0, 0.1, 0.1, 1.0, 0.5}, 1000, 0).ok());
  EXPECT_FALSE(GbmMomentOracle({1.0, 0.1, 0.1, 1.0, 0.5}, 999, 0).ok());
}

TEST(SupOracleTest, ZeroCapacity) {
  auto s = SampleSet::Random(3, 2, 0.1, 1.0, 1);
  const std::vector<int> signs = {1, -1, 1};
  auto r = SupRandomSearchOracle(*s, signs, {0.0, 1.0, 0.5, 0.0}, 100, 1);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->best, 0.0);
  EXPECT_EQ(r->closed_form, 0.0);
}

TEST(SupOracleTest, OneDimensionalOptimum) {
  auto s = SampleSet::Create({{2.0}, {0.5}});
  const std::vector<int> signs = {1, -1};
  const ComplexityParams params{1.5, 1.0, 0.5, 0.0};
  auto r = SupRandomSearchOracle(*s, signs, params, 10'000, 2);
  ASSERT_TRUE(r.ok());
  const double exact =
      1.5 * std::exp(1.5 * 0.5) * std::abs(std::sqrt(2.0) - std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(r->closed_form, exact);
  EXPECT_LE(r->best, exact * (1 + 1e-9));
  EXPECT_GE(r->best, exact * (1 - 1e-3));
}

TEST(SupOracleTest, NeverExceedsClosedFormAndGetsClose) {
  nn::Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 4;
    auto s = SampleSet::Random(4, d, 0.1, 2.0, 100 + trial);
    std::vector<int> signs(4);
    for (int& v : signs) v = rng.Uniform() < 0.5 ? -1 : 1;
    const ComplexityParams params{rng.Uniform(0.2, 1.5), rng.Uniform(0.2, 2.0),
                                  rng.Uniform(0.1, 0.9), 0.0};
    auto r = SupRandomSearchOracle(*s, signs, params, 10'000, trial);
    ASSERT_TRUE(r.ok());
    EXPECT_LE(r->best, r->closed_form * (1 + 1e-9));
    EXPECT_GE(r->best, 0.9 * r->closed_form);
  }
}

TEST(SupOracleTest, RejectsBadSigns) {
  auto s = SampleSet::Random(2, 2, 0.1, 1.0, 1);
  EXPECT_FALSE(SupRandomSearchOracle(*s, std::vector<int>{1}, {}, 10, 0).ok());
  EXPECT_FALSE(
      SupRandomSearchOracle(*s, std::vector<int>{1, 0}, {}, 10, 0).ok());
}

TEST(ReportTest, RenderAndCsv) {
  auto s = SampleSet::Random(4, 2, 0.1, 1.0, 1);
  auto r = BuildComplexityReport(*s, {1.0, 2.0, 0.5, 1.0}, {}, 1000);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->gbm_z_scores.size(), 10u);
  const std::string text = RenderComplexityReport(*r);
  EXPECT_NE(text.find("method=closed_form_enumerated\n"), std::string::npos);
  EXPECT_NE(text.find("ratio=0.77880078307140"), std::string::npos);
  const std::string header = ComplexityCsvHeader();
  const std::string row = ComplexityCsvRow(*r);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','),
            std::count(row.begin(), row.end(), ','));
}

}  // namespace
}  // namespace rp::rademacher
