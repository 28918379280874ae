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

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "boost/math/quadrature/gauss_kronrod.hpp"
#include "gtest/gtest.h"
#include "nn_core/rng.h"

namespace rp::dp {
namespace {

// Renyi divergence of order alpha between N(0, s^2) and N(delta, s^2) by
// adaptive quadrature of the defining integral.
double QuadratureRenyi(double alpha, double delta, double s) {
  auto log_pdf = [s](double x, double mu) {
    return -0.5 * std::pow((x - mu) / s, 2) -
           std::log(s * std::sqrt(2 * std::numbers::pi));
  };
  auto integrand = [&](double x) {
    return std::exp(alpha * log_pdf(x, 0.0) + (1 - alpha) * log_pdf(x, delta));
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          integrand, -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), 15, 1e-14);
  return std::log(integral) / (alpha - 1);
}

// Closed-form inverse of the additive calibration: with
// K = 2 P max(R^2/pi^2, G^2/gamma^2) and L = log(1/delta), feasibility is
// lambda eps^2 - K eps - K L / (1 - lambda) >= 0.
double ClosedFormEpsilon(double gamma, double pi, double delta, double lambda,
                         const CalibrationInputs& in) {
  const double p = static_cast<double>(in.Participations());
  const double k = 2 * p *
                   std::max(std::pow(in.input_bound / pi, 2),
                            std::pow(in.residual_bound / gamma, 2));
  const double l = std::log(1 / delta);
  return (k + std::sqrt(k * k + 4 * lambda * k * l / (1 - lambda))) /
         (2 * lambda);
}

CalibrationInputs Inputs(std::int64_t t, std::int64_t b, std::int64_t n) {
  CalibrationInputs in;
  in.iterations = t;
  in.batch_size = b;
  in.train_size = n;
  in.num_blocks = 4;
  in.input_bound = 3.0;
  in.residual_bound = 5.0;
  return in;
}

TEST(GaussianRdpTest, Examples) {
  EXPECT_EQ(GaussianRdp(2, 1, 1)->eps_rdp, 1.0);
  EXPECT_EQ(GaussianRdp(2, 0, 0.3)->eps_rdp, 0.0);
  EXPECT_EQ(GaussianRdp(7, 0, 5)->eps_rdp, 0.0);
  EXPECT_FALSE(GaussianRdp(2, 1, 0).ok());
  EXPECT_FALSE(GaussianRdp(2, 1, -1).ok());
  EXPECT_FALSE(GaussianRdp(1, 1, 1).ok());
}

TEST(GaussianRdpTest, MatchesQuadrature) {
  EXPECT_NEAR(QuadratureRenyi(2, 1, 1), 1.0, 1e-6);
  for (double alpha : {1.5, 2.0, 4.0, 8.0}) {
    for (double delta : {0.5, 1.0, 2.0}) {
      for (double sigma : {0.5, 1.0, 2.0}) {
        EXPECT_NEAR(GaussianRdp(alpha, delta, sigma)->eps_rdp,
                    QuadratureRenyi(alpha, delta, sigma), 1e-6)
            << alpha << " " << delta << " " << sigma;
      }
    }
  }
}

TEST(RdpComposeTest, Additivity) {
  std::vector<RdpPoint> two = {{2, 0.3}, {2, 0.7}};
  auto c = RdpCompose(two);
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c->alpha, 2.0);
  EXPECT_DOUBLE_EQ(c->eps_rdp, 1.0);
  std::vector<RdpPoint> one = {{3, 0.25}};
  EXPECT_EQ(RdpCompose(one)->eps_rdp, 0.25);
  std::vector<RdpPoint> many(9, RdpPoint{2, 0.125});
  EXPECT_EQ(RdpCompose(many)->eps_rdp, 9 * 0.125);
  std::vector<RdpPoint> mixed = {{2, 0.1}, {3, 0.1}};
  EXPECT_FALSE(RdpCompose(mixed).ok());
  EXPECT_FALSE(RdpCompose({}).ok());
}

TEST(RdpToDpTest, Examples) {
  EXPECT_DOUBLE_EQ(*RdpToDp({2, 0}, std::exp(-1.0)), 1.0);
  EXPECT_NEAR(*RdpToDp({2, 1}, 1e-5), 12.512925464970229, 1e-12);
  EXPECT_FALSE(RdpToDp({2, 1}, 0.0).ok());
  EXPECT_FALSE(RdpToDp({2, 1}, 1.0).ok());
  EXPECT_LT(*RdpToDp({2, 0}, 1 - 1e-12), 1e-11);
}

TEST(RdpToDpTest, Monotonicity) {
  double previous = std::numeric_limits<double>::infinity();
  for (double delta = 1e-9; delta < 1; delta *= 3) {
    const double eps = *RdpToDp({3, 0.5}, delta);
    EXPECT_LT(eps, previous);
    previous = eps;
  }
  previous = -1;
  for (double rdp = 0; rdp < 10; rdp += 0.5) {
    const double eps = *RdpToDp({3, rdp}, 1e-5);
    EXPECT_GT(eps, previous);
    previous = eps;
  }
}

TEST(CalibrateStrategy1Test, PlugIn) {
  const DpBudget budget{2.0, std::exp(-1.0), 0.5};
  const CalibrationInputs in = Inputs(1000, 10, 500);  // P = 20
  auto r = CalibrateStrategy1(budget, in);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r->alpha, 2.0);
  EXPECT_DOUBLE_EQ(r->pi_min, 2 * 3.0 * std::sqrt(20.0));
  EXPECT_DOUBLE_EQ(r->gamma_min, 2 * 5.0 * std::sqrt(20.0));
  EXPECT_EQ(r->whole_model_epsilon, 2.0);
}

TEST(CalibrateStrategy1Test, DoublingIterationsScalesBySqrtTwo) {
  const DpBudget budget{1.3, 1e-5, 0.3};
  auto a = CalibrateStrategy1(budget, Inputs(1000, 10, 500));
  auto b = CalibrateStrategy1(budget, Inputs(2000, 10, 500));
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_NEAR(b->pi_min / a->pi_min, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(b->gamma_min / a->gamma_min, std::sqrt(2.0), 1e-15);
}

TEST(CalibrateStrategy1Test, ParticipationsRoundUp) {
  EXPECT_EQ(Inputs(64000, 128, 50000).Participations(), 164);
  EXPECT_EQ(Inputs(31300, 128, 39952).Participations(), 101);
  EXPECT_EQ(Inputs(10, 5, 50).Participations(), 1);
}

TEST(CalibrateStrategy1Test, PerLayerEpsilons) {
  nn::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const DpBudget budget{rng.Uniform(0.1, 50), 1e-5, rng.Uniform(0.01, 0.99)};
    const auto layers = PerLayerEpsilons(budget, 6);
    ASSERT_EQ(layers.size(), 7u);
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const double expected =
          (budget.lambda_split / (i + 1) + (1 - budget.lambda_split)) *
          budget.epsilon;
      EXPECT_EQ(layers[i].epsilon, expected);
      EXPECT_LE(layers[i].epsilon, budget.epsilon);
      EXPECT_GE(layers[i].epsilon, (1 - budget.lambda_split) * budget.epsilon);
      if (i > 0) EXPECT_LE(layers[i].epsilon, layers[i - 1].epsilon);
    }
  }
}

TEST(CalibrateStrategy1Test, InvalidInputs) {
  EXPECT_FALSE(CalibrateStrategy1({0.0, 1e-5, 0.5}, Inputs(10, 5, 50)).ok());
  EXPECT_FALSE(CalibrateStrategy1({1.0, 1e-5, 1.0}, Inputs(10, 5, 50)).ok());
  EXPECT_FALSE(CalibrateStrategy1({1.0, 1e-5, 0.5}, Inputs(10, 60, 50)).ok());
}

TEST(AchievedEpsilonTest, MatchesClosedForm) {
  nn::Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    CalibrationInputs in = Inputs(rng.Index(10000) + 1, rng.Index(64) + 1,
                                  rng.Index(5000) + 64);
    in.input_bound = rng.Uniform(0.1, 40);
    in.residual_bound = rng.Uniform(0.1, 40);
    const double gamma = std::exp(rng.Uniform(-2, 8));
    const double pi = std::exp(rng.Uniform(-2, 8));
    const double delta = std::exp(rng.Uniform(-20, -1));
    const double lambda = rng.Uniform(0.02, 0.98);
    const double expected = ClosedFormEpsilon(gamma, pi, delta, lambda, in);
    auto eps = AchievedEpsilonStrategy1(gamma, pi, delta, lambda, in);
    if (expected > kMaxEpsilon) {
      EXPECT_EQ(eps.status().code(), absl::StatusCode::kOutOfRange);
      continue;
    }
    ASSERT_TRUE(eps.ok()) << eps.status();
    EXPECT_NEAR(*eps / expected, 1.0, 1e-8);
  }
}

TEST(AchievedEpsilonTest, RoundTrip) {
  nn::Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    CalibrationInputs in = Inputs(rng.Index(10000) + 1, rng.Index(64) + 1,
                                  rng.Index(5000) + 64);
    in.input_bound = rng.Uniform(0.1, 40);
    in.residual_bound = rng.Uniform(0.1, 40);
    const DpBudget budget{std::exp(rng.Uniform(-3, 8)),
                          std::exp(rng.Uniform(-20, -1)),
                          rng.Uniform(0.02, 0.98)};
    auto report = CalibrateStrategy1(budget, in);
    ASSERT_TRUE(report.ok());
    auto eps = AchievedEpsilonStrategy1(report->gamma_min, report->pi_min,
                                        budget.delta, budget.lambda_split, in);
    ASSERT_TRUE(eps.ok());
    EXPECT_NEAR(*eps / budget.epsilon, 1.0, 1e-6);
  }
  const DpBudget ten{10.0, 1e-5, 0.5};
  const CalibrationInputs in = Inputs(5000, 32, 1000);
  auto report = CalibrateStrategy1(ten, in);
  auto eps = AchievedEpsilonStrategy1(report->gamma_min, report->pi_min, 1e-5,
                                      0.5, in);
  EXPECT_NEAR(*eps, 10.0, 1e-5);
}

TEST(AchievedEpsilonTest, VacuousNoiseAndMonotonicity) {
  const CalibrationInputs in = Inputs(100, 10, 1000);
  auto tiny = AchievedEpsilonStrategy1(1e12, 1e12, 1e-5, 0.5, in);
  ASSERT_TRUE(tiny.ok());
  EXPECT_LT(*tiny, 1e-8);
  auto small_gamma = AchievedEpsilonStrategy1(10, 100, 1e-5, 0.5, in);
  auto large_gamma = AchievedEpsilonStrategy1(20, 100, 1e-5, 0.5, in);
  ASSERT_TRUE(small_gamma.ok() && large_gamma.ok());
  EXPECT_GT(*small_gamma, *large_gamma);
  EXPECT_EQ(AchievedEpsilonStrategy1(1e-6, 1e-6, 1e-5, 0.5, in).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_FALSE(AchievedEpsilonStrategy1(0, 1, 1e-5, 0.5, in).ok());
}

TEST(BestOrderTest, AgreesWithMinimumOverLambda) {
  const CalibrationInputs in = Inputs(31300, 128, 39952);
  const double gamma = 8.0, pi = 4.0;
  auto best = BestOrderEpsilonStrategy1(gamma, pi, 1e-5, in);
  ASSERT_TRUE(best.ok());
  double min_lambda = std::numeric_limits<double>::infinity();
  for (double lambda = 0.001; lambda < 1; lambda += 0.001) {
    auto eps = AchievedEpsilonStrategy1(gamma, pi, 1e-5, lambda, in);
    ASSERT_TRUE(eps.ok());
    min_lambda = std::min(min_lambda, *eps);
  }
  EXPECT_LE(best->epsilon, min_lambda * (1 + 1e-6));
  EXPECT_NEAR(best->epsilon / min_lambda, 1.0, 1e-3);
}

TEST(CalibrateStrategy2Test, PlugIn) {
  const DpBudget budget{2.0, std::exp(-1.0), 0.5};
  CalibrationInputs in = Inputs(10, 5, 50);
  in.num_blocks = 1;
  in.activation_bound = 2.0;
  in.eta = 0.1;
  in.head_bound = 0.7;
  auto one = CalibrateStrategy2(budget, in);
  ASSERT_TRUE(one.ok());
  EXPECT_DOUBLE_EQ(one->alpha, 2.0);
  // sqrt(2 alpha M / (lambda eps)) = sqrt(4 M) = 2 sqrt(M).
  EXPECT_DOUBLE_EQ(one->gamma_min, 20.0 * 2.0);
  EXPECT_DOUBLE_EQ(one->pi_min, 0.7 * 2.0);
  in.num_blocks = 4;
  auto four = CalibrateStrategy2(budget, in);
  EXPECT_DOUBLE_EQ(four->gamma_min, 2 * one->gamma_min);
  EXPECT_DOUBLE_EQ(four->pi_min, 2 * one->pi_min);
  in.activation_bound = 0.0;
  EXPECT_EQ(CalibrateStrategy2(budget, in)->gamma_min, 0.0);
}

TEST(EmpiricalEpsilonTest, RateExamples) {
  EXPECT_EQ(EpsilonLowerBoundFromRates(0.5, 0.5, 0), 0.0);
  EXPECT_NEAR(EpsilonLowerBoundFromRates(0.1, 0.1, 0), std::log(9.0), 1e-15);
  EXPECT_NEAR(EpsilonLowerBoundFromRates(0.1, 0.1, 0), 2.1972, 1e-4);
  EXPECT_EQ(EpsilonLowerBoundFromRates(0.9, 0.9, 0), 0.0);
  double previous = 0;
  for (double fpr = 0.4; fpr > 1e-6; fpr /= 2) {
    const double eps = EpsilonLowerBoundFromRates(fpr, 0.3, 1e-5);
    EXPECT_GT(eps, previous);
    previous = eps;
  }
}

TEST(EmpiricalEpsilonTest, ClopperPearsonClosedForms) {
  // Zero successes: 1 - (1 - c)^(1/n).
  for (int n : {1, 10, 250}) {
    EXPECT_NEAR(ClopperPearsonUpper(0, n, 0.95),
                1 - std::pow(0.05, 1.0 / n), 1e-12);
  }
  // n - 1 successes: c^(1/n).
  EXPECT_NEAR(ClopperPearsonUpper(9, 10, 0.95), std::pow(0.95, 0.1), 1e-12);
  EXPECT_EQ(ClopperPearsonUpper(10, 10, 0.95), 1.0);
}

TEST(EmpiricalEpsilonTest, FromCounts) {
  auto coin = EmpiricalEpsilonLowerBound({125, 250, 125, 250}, 1e-5);
  ASSERT_TRUE(coin.ok());
  EXPECT_EQ(*coin, 0.0);
  auto strong = EmpiricalEpsilonLowerBound({5, 250, 5, 250}, 1e-5);
  ASSERT_TRUE(strong.ok());
  const double hi = ClopperPearsonUpper(5, 250, 0.95);
  EXPECT_NEAR(*strong, std::log((1 - 1e-5 - hi) / hi), 1e-12);
  EXPECT_FALSE(EmpiricalEpsilonLowerBound({0, 0, 0, 1}, 1e-5).ok());
  EXPECT_FALSE(EmpiricalEpsilonLowerBound({3, 2, 0, 1}, 1e-5).ok());
}

TEST(RenderTest, EchoesInputs) {
  auto r = CalibrateStrategy1({2.0, 1e-5, 0.25}, Inputs(1000, 10, 500));
  ASSERT_TRUE(r.ok());
  const std::string text = RenderCalibrationReport(*r);
  for (const char* key : {"epsilon=2\n", "delta=1.0000000000000001e-05\n",
                          "lambda=0.25\n", "T=1000\n", "b=10\n", "N=500\n",
                          "M=4\n", "participations=20\n", "layer_epsilon.4=",
                          "pi_min=", "gamma_min="}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace rp::dp
