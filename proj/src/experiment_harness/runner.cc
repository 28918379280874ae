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

#include "experiment_harness/runner.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "dp_accountant/accountant.h"
#include "dpsgd_baseline/dpsgd.h"
#include "experiment_harness/dataset_io.h"
#include "experiment_harness/png_io.h"
#include "membership_attack/experiment.h"
#include "nn_core/format.h"
#include "rademacher/complexity.h"
#include "residual_model/checkpoint.h"
#include "residual_model/ensemble.h"
#include "sde_lab/image.h"
#include "sde_lab/swirl.h"

namespace rp::harness {
namespace {

using Json = nlohmann::ordered_json;

// Streams derived from the master seed.
enum Stream : std::uint64_t {
  kDataStream = 1,
  kSplitStream,
  kInitStream,
  kTrainStream,
  kAttackStream,
  kSampleStream,
  kExpectationStream,
  kSupStream,
  kSdeStream,
};

std::uint64_t SeedFor(const ExperimentConfig& c, Stream s) {
  return nn::Rng::DeriveSeed(c.seed, s);
}

absl::Status Stage(absl::string_view stage, const absl::Status& s) {
  if (s.ok()) return s;
  return absl::Status(s.code(), absl::StrCat(stage, ": ", s.message()));
}

template <typename T>
absl::StatusOr<T> Stage(absl::string_view stage, absl::StatusOr<T> v) {
  if (v.ok()) return v;
  return Stage(stage, v.status());
}

#define RP_STAGE_ASSIGN(lhs, stage, expr)                  \
  auto lhs##_or = Stage(stage, (expr));                    \
  if (!lhs##_or.ok()) return lhs##_or.status();            \
  auto& lhs = *lhs##_or

std::string RunName(double gamma, std::size_t k) {
  return absl::StrCat("gamma", nn::FormatDouble(gamma), "_k", k);
}

model::NetSpec SpecFor(const ExperimentConfig& c, const nn::Dataset& data) {
  model::NetSpec spec = c.spec;
  spec.input_dim = data.dim();
  spec.num_outputs = static_cast<std::size_t>(std::max(2, data.num_classes));
  return spec;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

Json DatasetJson(const nn::Dataset& d) {
  return {{"examples", d.size()}, {"dim", d.dim()},
          {"classes", d.num_classes}};
}

Json ThresholdTableJson(const attack::AttackReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.table) {
    rows.push_back({{"threshold", row.threshold},
                    {"precision", row.precision},
                    {"recall", row.recall},
                    {"tp", row.true_positives},
                    {"fp", row.false_positives},
                    {"fn", row.false_negatives},
                    {"tn", row.true_negatives}});
  }
  return rows;
}

// Largest Clopper-Pearson epsilon lower bound over the threshold table.
double EmpiricalEpsilon(const attack::AttackReport& r, double delta) {
  double best = 0.0;
  for (const auto& row : r.table) {
    dp::AttackOutcomes o;
    o.false_positives = row.false_positives;
    o.negatives = r.negatives;
    o.false_negatives = row.false_negatives;
    o.positives = r.positives;
    auto eps = dp::EmpiricalEpsilonLowerBound(o, delta);
    if (eps.ok()) best = std::max(best, *eps);
  }
  return best;
}

Curve RocCurveOf(const std::string& name, const attack::AttackReport& r) {
  Curve c{name, "roc", "false positive rate", "true positive rate", {}};
  for (const auto& p : r.roc) c.points.emplace_back(p.fpr, p.tpr);
  return c;
}

Artifact ScoresArtifact(const std::string& name,
                        const attack::MembershipExperimentResult& r) {
  std::string csv = "member,score\n";
  for (double s : r.member_scores) {
    absl::StrAppend(&csv, "1,", nn::FormatDouble(s), "\n");
  }
  for (double s : r.nonmember_scores) {
    absl::StrAppend(&csv, "0,", nn::FormatDouble(s), "\n");
  }
  return {absl::StrCat("scores_", name, ".csv"), std::move(csv)};
}

attack::MembershipExperimentConfig MembershipConfig(
    const ExperimentConfig& c, const model::NetSpec& spec, double gamma,
    std::size_t k) {
  attack::MembershipExperimentConfig m;
  m.target.spec = spec;
  m.target.noise = NoiseFor(c, gamma);
  m.target.ensemble_size = k;
  m.target.train = c.train;
  m.shadow.spec = spec;
  m.shadow.train = c.train;
  m.attack = c.attack;
  m.thresholds = c.thresholds;
  m.stratified = c.stratified;
  m.top_k = c.top_k;
  m.threads = c.threads;
  m.seed = SeedFor(c, kAttackStream);
  return m;
}

Json MembershipRunJson(const attack::MembershipExperimentResult& r,
                       double delta) {
  return {{"auc", r.report.auc},
          {"target_train_accuracy", r.utility.target_train_accuracy},
          {"target_test_accuracy", r.utility.target_test_accuracy},
          {"generalization_gap", r.utility.generalization_gap()},
          {"shadow_train_accuracy", r.utility.shadow_train_accuracy},
          {"shadow_test_accuracy", r.utility.shadow_test_accuracy},
          {"attack_train_accuracy", r.utility.attack_train_accuracy},
          {"empirical_epsilon_lower_bound", EmpiricalEpsilon(r.report, delta)},
          {"members", r.report.positives},
          {"non_members", r.report.negatives},
          {"thresholds", ThresholdTableJson(r.report)}};
}

absl::Status RunTrain(const ExperimentConfig& c, ResultRecord* record) {
  RP_STAGE_ASSIGN(data, "load_dataset",
                  LoadDataset(c.dataset, SeedFor(c, kDataStream)));
  RP_STAGE_ASSIGN(split, "split",
                  SplitTrainTest(data, c.dataset.test_fraction,
                                 SeedFor(c, kSplitStream)));
  const model::NetSpec spec = SpecFor(c, data);
  record->metrics["train_set"] = DatasetJson(split.train);
  record->metrics["test_set"] = DatasetJson(split.test);
  Json runs = Json::array();
  Json timings = Json::array();
  const auto gammas = GammaValues(c);
  const auto sizes = EnsembleSizes(c);
  for (std::size_t k : sizes) {
    Curve test_curve{absl::StrCat("test_accuracy_k", k), "accuracy_vs_gamma",
                     "gamma", "accuracy", {}};
    Curve train_curve{absl::StrCat("train_accuracy_k", k), "accuracy_vs_gamma",
                      "gamma", "accuracy", {}};
    for (double gamma : gammas) {
      RP_STAGE_ASSIGN(ensemble, "build_model",
                      model::EnsembleModel::Create(spec, NoiseFor(c, gamma), k,
                                                   SeedFor(c, kInitStream)));
      model::TrainConfig tc = c.train;
      tc.seed = SeedFor(c, kTrainStream);
      RP_STAGE_ASSIGN(history, "train",
                      model::TrainEnsemble(ensemble, split.train, &split.test,
                                           tc, c.threads));
      record->artifacts.push_back(
          {absl::StrCat("model_", RunName(gamma, k), ".ckpt"),
           model::SerializeCheckpoint({c.seed, std::move(ensemble)})});
      Json epochs = Json::array();
      for (const auto& e : history.members.front().epochs) {
        epochs.push_back({{"epoch", e.epoch},
                          {"learning_rate", e.learning_rate},
                          {"train_loss", e.train_loss},
                          {"train_accuracy", e.train_accuracy},
                          {"test_accuracy", e.test_accuracy}});
      }
      runs.push_back({{"gamma", gamma},
                      {"ensemble_size", k},
                      {"train_accuracy", history.train_accuracy},
                      {"test_accuracy", history.test_accuracy},
                      {"generalization_gap",
                       history.train_accuracy - history.test_accuracy},
                      {"member0_epochs", std::move(epochs)}});
      double member_seconds = 0.0;
      for (const auto& h : history.members) member_seconds += h.seconds;
      timings.push_back(
          {{"run", RunName(gamma, k)},
           {"seconds", history.seconds},
           {"seconds_per_epoch_per_network",
            c.train.epochs > 0 ? member_seconds / (c.train.epochs * k) : 0.0}});
      test_curve.points.emplace_back(gamma, history.test_accuracy);
      train_curve.points.emplace_back(gamma, history.train_accuracy);
      if (gammas.size() == 1 && sizes.size() == 1) {
        Curve tr{"member0_train_accuracy", "accuracy_vs_epoch", "epoch",
                 "accuracy", {}};
        Curve te{"member0_test_accuracy", "accuracy_vs_epoch", "epoch",
                 "accuracy", {}};
        for (const auto& e : history.members.front().epochs) {
          if (e.train_accuracy >= 0) tr.points.emplace_back(e.epoch, e.train_accuracy);
          if (e.test_accuracy >= 0) te.points.emplace_back(e.epoch, e.test_accuracy);
        }
        record->curves.push_back(std::move(tr));
        record->curves.push_back(std::move(te));
      }
    }
    if (gammas.size() > 1) {
      record->curves.push_back(std::move(train_curve));
      record->curves.push_back(std::move(test_curve));
    }
  }
  record->metrics["runs"] = std::move(runs);
  record->timings["runs"] = std::move(timings);
  return absl::OkStatus();
}

absl::Status RunAttack(const ExperimentConfig& c, ResultRecord* record) {
  RP_STAGE_ASSIGN(pool, "load_dataset",
                  LoadDataset(c.dataset, SeedFor(c, kDataStream)));
  const model::NetSpec spec = SpecFor(c, pool);
  record->metrics["pool"] = DatasetJson(pool);
  const auto gammas = GammaValues(c);
  const auto sizes = EnsembleSizes(c);
  Json runs = Json::array();
  Json timings = Json::array();
  // auc[k index][gamma index]
  std::vector<std::vector<double>> auc(sizes.size());
  for (std::size_t ki = 0; ki < sizes.size(); ++ki) {
    const std::size_t k = sizes[ki];
    Curve auc_curve{absl::StrCat("auc_k", k), "auc_vs_gamma", "gamma", "AUC",
                    {}};
    Curve acc_curve{absl::StrCat("test_accuracy_k", k), "accuracy_vs_gamma",
                    "gamma", "test accuracy", {}};
    for (double gamma : gammas) {
      const std::string name = RunName(gamma, k);
      RP_STAGE_ASSIGN(result, absl::StrCat("membership_attack[", name, "]"),
                      attack::RunMembershipExperiment(
                          pool, nullptr, MembershipConfig(c, spec, gamma, k)));
      Json run = {{"gamma", gamma}, {"ensemble_size", k}};
      run.update(MembershipRunJson(result, c.accountant.budget.delta));
      runs.push_back(std::move(run));
      timings.push_back({{"run", name},
                         {"seconds", result.seconds},
                         {"target_seconds_per_epoch_per_network",
                          result.target_seconds_per_epoch / k}});
      record->curves.push_back(RocCurveOf("roc_" + name, result.report));
      record->artifacts.push_back(ScoresArtifact(name, result));
      auc_curve.points.emplace_back(gamma, result.report.auc);
      acc_curve.points.emplace_back(gamma, result.utility.target_test_accuracy);
      auc[ki].push_back(result.report.auc);
    }
    if (gammas.size() > 1) {
      record->curves.push_back(std::move(auc_curve));
      record->curves.push_back(std::move(acc_curve));
    }
  }
  if (sizes.size() > 1) {
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      Curve grid{absl::StrCat("auc_vs_ensemble_gamma",
                              nn::FormatDouble(gammas[gi])),
                 "auc_vs_ensemble_size", "ensemble size", "AUC", {}};
      for (std::size_t ki = 0; ki < sizes.size(); ++ki) {
        grid.points.emplace_back(static_cast<double>(sizes[ki]), auc[ki][gi]);
      }
      record->curves.push_back(std::move(grid));
    }
  }
  Json slopes = Json::array();
  for (std::size_t ki = 0; ki < sizes.size(); ++ki) {
    slopes.push_back({{"ensemble_size", sizes[ki]},
                      {"auc_slope_vs_gamma", RegressionSlope(gammas, auc[ki])}});
  }
  record->metrics["runs"] = std::move(runs);
  record->metrics["auc_trend"] = std::move(slopes);
  record->timings["runs"] = std::move(timings);
  return absl::OkStatus();
}

absl::Status RunAccountant(const ExperimentConfig& c, ResultRecord* record) {
  const auto& a = c.accountant;
  RP_STAGE_ASSIGN(s1, "calibrate_additive",
                  dp::CalibrateStrategy1(a.budget, a.inputs));
  RP_STAGE_ASSIGN(s2, "calibrate_multiplicative",
                  dp::CalibrateStrategy2(a.budget, a.inputs));
  Json layers = Json::array();
  for (const auto& l : s1.per_layer_epsilons) {
    layers.push_back({{"layer", l.layer}, {"epsilon", l.epsilon}});
  }
  record->metrics["participations"] = a.inputs.Participations();
  record->metrics["alpha"] = s1.alpha;
  record->metrics["additive"] = {{"pi_min", s1.pi_min},
                                 {"gamma_min", s1.gamma_min},
                                 {"whole_model_epsilon", s1.whole_model_epsilon},
                                 {"delta", s1.delta},
                                 {"per_layer_epsilons", std::move(layers)}};
  record->metrics["multiplicative"] = {{"gamma_min", s2.gamma_min},
                                       {"pi_min", s2.pi_min},
                                       {"alpha", s2.alpha}};
  if (a.gamma > 0.0) {
    const double pi = a.pi > 0.0 ? a.pi : a.gamma / 2.0;
    RP_STAGE_ASSIGN(eps, "achieved_epsilon",
                    dp::AchievedEpsilonStrategy1(a.gamma, pi, a.budget.delta,
                                                 a.budget.lambda_split,
                                                 a.inputs));
    RP_STAGE_ASSIGN(best, "best_order_epsilon",
                    dp::BestOrderEpsilonStrategy1(a.gamma, pi, a.budget.delta,
                                                  a.inputs));
    record->metrics["achieved"] = {{"gamma", a.gamma},
                                   {"pi", pi},
                                   {"epsilon", eps},
                                   {"best_order_epsilon", best.epsilon},
                                   {"best_order_alpha", best.alpha}};
    // Achieved epsilon across the budget split.
    Curve curve{"achieved_epsilon_vs_lambda", "achieved_epsilon", "lambda",
                "epsilon", {}};
    for (int i = 1; i < 20; ++i) {
      const double lambda = i / 20.0;
      auto e = dp::AchievedEpsilonStrategy1(a.gamma, pi, a.budget.delta,
                                            lambda, a.inputs);
      if (e.ok()) curve.points.emplace_back(lambda, *e);
    }
    record->curves.push_back(std::move(curve));
  }
  record->artifacts.push_back(
      {"calibration.txt", dp::RenderCalibrationReport(s1)});
  return absl::OkStatus();
}

absl::Status RunRademacher(const ExperimentConfig& c, ResultRecord* record) {
  const auto& r = c.rademacher;
  RP_STAGE_ASSIGN(samples, "samples",
                  rademacher::SampleSet::Random(r.n, r.d, r.lo, r.hi,
                                                SeedFor(c, kSampleStream)));
  rademacher::ExpectationOptions options;
  options.mc_draws = r.mc_draws;
  options.seed = SeedFor(c, kExpectationStream);
  options.threads = c.threads;
  options.force_monte_carlo = r.force_monte_carlo;
  RP_STAGE_ASSIGN(report, "complexity",
                  rademacher::BuildComplexityReport(samples, r.params, options,
                                                    r.gbm_paths));
  record->metrics["n"] = report.n;
  record->metrics["d"] = report.d;
  record->metrics["method"] =
      rademacher::EstimateMethodName(report.sigma_expectation.method);
  record->metrics["sigma_expectation"] = report.sigma_expectation.value;
  record->metrics["sigma_expectation_se"] = report.sigma_expectation.std_error;
  record->metrics["complexity_f"] = report.f.value;
  record->metrics["complexity_g"] = report.g.value;
  record->metrics["ratio"] = report.ratio;
  record->metrics["damping_factor"] = rademacher::NoiseDampingFactor(r.params);
  record->metrics["gbm_z_scores"] = report.gbm_z_scores;
  if (r.sup_trials > 0) {
    if (r.n <= 8 && r.d <= 8) {
      nn::Rng sign_rng(SeedFor(c, kSupStream));
      std::vector<int> signs(r.n);
      for (int& s : signs) s = sign_rng.Uniform() < 0.5 ? -1 : 1;
      RP_STAGE_ASSIGN(sup, "sup_oracle",
                      rademacher::SupRandomSearchOracle(
                          samples, signs, r.params, r.sup_trials,
                          nn::Rng::DeriveSeed(SeedFor(c, kSupStream), 1)));
      record->metrics["sup_oracle"] = {
          {"signs", signs},
          {"best", sup.best},
          {"closed_form", sup.closed_form},
          {"ratio", sup.closed_form > 0 ? sup.best / sup.closed_form : 1.0}};
    } else {
      record->notes.push_back("sup oracle skipped: needs n <= 8 and d <= 8");
    }
  }
  // Damping of the noisy class as gamma grows.
  Curve curve{"complexity_ratio_vs_gamma", "complexity_ratio", "gamma",
              "R(G) / R(F)", {}};
  for (int i = 0; i <= 20; ++i) {
    rademacher::ComplexityParams p = r.params;
    p.gamma = 0.1 * i;
    curve.points.emplace_back(p.gamma, rademacher::NoiseDampingFactor(p));
  }
  record->curves.push_back(std::move(curve));
  record->artifacts.push_back(
      {"complexity.txt", rademacher::RenderComplexityReport(report)});
  record->artifacts.push_back(
      {"complexity_row.csv", absl::StrCat(rademacher::ComplexityCsvHeader(),
                                          "\n",
                                          rademacher::ComplexityCsvRow(report),
                                          "\n")});
  return absl::OkStatus();
}

absl::Status AddImage(const std::string& stem, const sde::ImageGrid& image,
                      ResultRecord* record) {
  RP_STAGE_ASSIGN(png, "encode_png", EncodePng(image));
  record->artifacts.push_back({stem + ".png", png});
  record->artifacts.push_back(
      {stem + (image.channels == 1 ? ".pgm" : ".ppm"), sde::EncodePnm(image)});
  return absl::OkStatus();
}

absl::Status RunSdeDemo(const ExperimentConfig& c, ResultRecord* record) {
  const auto& s = c.sde;
  sde::ImageGrid image;
  if (s.image.empty()) {
    image = sde::MakeTestPattern(s.rows, s.cols, s.channels);
  } else {
    RP_STAGE_ASSIGN(loaded, "load_image", sde::ReadPnm(s.image));
    image = loaded;
  }
  sde::SdeRunConfig ode;
  ode.mode = sde::SdeMode::kOde;
  ode.dt = s.dt;
  ode.t_end = s.t_end;
  ode.seed = SeedFor(c, kSdeStream);
  sde::SdeRunConfig noisy = ode;
  noisy.mode = s.multiplicative ? sde::SdeMode::kSdeMultiplicative
                                : sde::SdeMode::kSdeAdditive;
  noisy.gamma = s.gamma;
  RP_STAGE_ASSIGN(ode_trip, "ode_round_trip", sde::ForwardBackward(image, ode));
  RP_STAGE_ASSIGN(sde_trip, "sde_round_trip",
                  sde::ForwardBackward(image, noisy));
  for (const auto& [stem, img] :
       std::vector<std::pair<std::string, const sde::ImageGrid*>>{
           {"input", &image},
           {"ode_forward", &ode_trip.forward},
           {"ode_backward", &ode_trip.recovered},
           {"sde_forward", &sde_trip.forward},
           {"sde_backward", &sde_trip.recovered}}) {
    if (auto st = AddImage(stem, *img, record); !st.ok()) return st;
  }
  record->metrics["image"] = {{"rows", image.rows},
                              {"cols", image.cols},
                              {"channels", image.channels}};
  record->metrics["steps"] = ode.Steps();
  record->metrics["sde_mode"] = sde::SdeModeName(noisy.mode);
  record->metrics["ode_reconstruction_error"] = ode_trip.error;
  record->metrics["sde_reconstruction_error"] = sde_trip.error;
  record->metrics["error_ratio"] =
      ode_trip.error > 0 ? sde_trip.error / ode_trip.error : 0.0;
  return absl::OkStatus();
}

attack::TargetTrainer DpsgdTrainer(const ExperimentConfig& c, double sigma) {
  return [&c, sigma](model::EnsembleModel& target, const nn::Dataset& train,
                     const model::TrainConfig& tc,
                     int) -> absl::StatusOr<model::EnsembleHistory> {
    model::EnsembleHistory out;
    for (std::size_t i = 0; i < target.members.size(); ++i) {
      dpsgd::DpSgdConfig dc;
      dc.clip_norm = c.dpsgd.clip_norm;
      dc.noise_multiplier = sigma;
      dc.microbatch_size = c.dpsgd.microbatch_size;
      dc.train = tc;
      dc.train.seed = nn::Rng::DeriveSeed(tc.seed, i);
      auto h = dpsgd::DpSgdTrain(target.members[i], train, nullptr, dc);
      if (!h.ok()) return h.status();
      out.members.push_back(h->history);
      out.seconds += h->history.seconds;
    }
    return out;
  };
}

absl::Status RunDpsgdCompare(const ExperimentConfig& c, ResultRecord* record) {
  RP_STAGE_ASSIGN(pool, "load_dataset",
                  LoadDataset(c.dataset, SeedFor(c, kDataStream)));
  model::NetSpec spec = SpecFor(c, pool);
  if (spec.batch_norm) {
    spec.batch_norm = false;
    record->notes.push_back(
        "batchnorm disabled in both arms: DPSGD needs per-example gradients");
  }
  record->metrics["pool"] = DatasetJson(pool);
  Json rp_runs = Json::array(), dp_runs = Json::array();
  Json timings = Json::array();
  double rp_best = -1.0, dp_best = -1.0;
  Curve rp_curve{"residual_perturbation", "privacy_utility", "AUC",
                 "test accuracy", {}};
  Curve dp_curve{"dpsgd", "privacy_utility", "AUC", "test accuracy", {}};
  for (std::size_t k : EnsembleSizes(c)) {
    for (double gamma : GammaValues(c)) {
      const std::string name = "rp_" + RunName(gamma, k);
      RP_STAGE_ASSIGN(result, absl::StrCat("membership_attack[", name, "]"),
                      attack::RunMembershipExperiment(
                          pool, nullptr, MembershipConfig(c, spec, gamma, k)));
      Json run = {{"gamma", gamma}, {"ensemble_size", k}};
      run.update(MembershipRunJson(result, c.accountant.budget.delta));
      rp_runs.push_back(std::move(run));
      timings.push_back({{"run", name},
                         {"seconds_per_epoch_per_network",
                          result.target_seconds_per_epoch / k}});
      record->artifacts.push_back(ScoresArtifact(name, result));
      rp_curve.points.emplace_back(result.report.auc,
                                   result.utility.target_test_accuracy);
      if (result.report.auc >= kChanceAucLow &&
          result.report.auc <= kChanceAucHigh) {
        rp_best = std::max(rp_best, result.utility.target_test_accuracy);
      }
    }
  }
  for (double sigma : c.dpsgd.noise_multipliers) {
    const std::string name =
        absl::StrCat("dpsgd_sigma", nn::FormatDouble(sigma));
    attack::MembershipExperimentConfig m =
        MembershipConfig(c, spec, 0.0, 1);
    m.target.noise = model::NoiseConfig::None();
    m.target_trainer = DpsgdTrainer(c, sigma);
    RP_STAGE_ASSIGN(result, absl::StrCat("membership_attack[", name, "]"),
                    attack::RunMembershipExperiment(pool, nullptr, m));
    Json run = {{"noise_multiplier", sigma}, {"clip_norm", c.dpsgd.clip_norm}};
    run.update(MembershipRunJson(result, c.accountant.budget.delta));
    dp_runs.push_back(std::move(run));
    timings.push_back({{"run", name},
                       {"seconds_per_epoch_per_network",
                        result.target_seconds_per_epoch}});
    record->artifacts.push_back(ScoresArtifact(name, result));
    dp_curve.points.emplace_back(result.report.auc,
                                 result.utility.target_test_accuracy);
    if (result.report.auc >= kChanceAucLow &&
        result.report.auc <= kChanceAucHigh) {
      dp_best = std::max(dp_best, result.utility.target_test_accuracy);
    }
  }
  auto by_auc = [](Curve& curve) {
    std::sort(curve.points.begin(), curve.points.end());
  };
  by_auc(rp_curve);
  by_auc(dp_curve);
  record->curves.push_back(std::move(rp_curve));
  record->curves.push_back(std::move(dp_curve));
  record->metrics["residual_perturbation_runs"] = std::move(rp_runs);
  record->metrics["dpsgd_runs"] = std::move(dp_runs);
  // -1 marks "no run inside the chance band".
  record->metrics["chance_band"] = {kChanceAucLow, kChanceAucHigh};
  record->metrics["best_in_band_test_accuracy"] = {
      {"residual_perturbation", rp_best}, {"dpsgd", dp_best}};
  record->timings["runs"] = std::move(timings);
  return absl::OkStatus();
}

#undef RP_STAGE_ASSIGN

}  // namespace

double RegressionSlope(const std::vector<double>& x,
                       const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

absl::StatusOr<ResultRecord> RunExperiment(const ExperimentConfig& config) {
  if (auto s = Stage("config", config.Validate()); !s.ok()) return s;
  const auto started = std::chrono::steady_clock::now();
  ResultRecord record;
  record.config = config;
  absl::Status status;
  switch (config.kind) {
    case ExperimentKind::kTrain:
      status = RunTrain(config, &record);
      break;
    case ExperimentKind::kAttack:
      status = RunAttack(config, &record);
      break;
    case ExperimentKind::kAccountant:
      status = RunAccountant(config, &record);
      break;
    case ExperimentKind::kRademacher:
      status = RunRademacher(config, &record);
      break;
    case ExperimentKind::kSdeDemo:
      status = RunSdeDemo(config, &record);
      break;
    case ExperimentKind::kDpsgdCompare:
      status = RunDpsgdCompare(config, &record);
      break;
  }
  if (!status.ok()) return status;
  record.timings["total_seconds"] = Seconds(started);
  return record;
}

absl::StatusOr<ResultRecord> RunAndWrite(const ExperimentConfig& config,
                                         std::vector<std::string>* manifest) {
  auto record = RunExperiment(config);
  if (!record.ok()) return record.status();
  auto files = WriteRecord(*record, config.out_dir);
  if (!files.ok()) return Stage("write_results", files.status());
  if (manifest != nullptr) *manifest = std::move(*files);
  return record;
}

}  // namespace rp::harness
