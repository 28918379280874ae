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

#ifndef RP_EXPERIMENT_HARNESS_CONFIG_H_
#define RP_EXPERIMENT_HARNESS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dp_accountant/accountant.h"
#include "dpsgd_baseline/dpsgd.h"
#include "membership_attack/attack_model.h"
#include "rademacher/complexity.h"
#include "residual_model/noise.h"
#include "residual_model/residual_net.h"
#include "residual_model/train.h"
#include "sde_lab/swirl.h"

namespace rp::harness {

enum class ExperimentKind {
  kTrain,
  kAttack,
  kAccountant,
  kRademacher,
  kSdeDemo,
  kDpsgdCompare
};

absl::string_view ExperimentKindName(ExperimentKind kind);
// Accepts both "sde_demo" and "sde-demo" style names.
absl::StatusOr<ExperimentKind> ParseExperimentKind(absl::string_view name);

enum class DatasetSource { kBlobs, kMoons, kCsv, kIdx };
absl::string_view DatasetSourceName(DatasetSource source);
absl::StatusOr<DatasetSource> ParseDatasetSource(absl::string_view name);

struct DatasetDescriptor {
  DatasetSource source = DatasetSource::kBlobs;
  std::size_t n = 1000;
  std::size_t dim = 20;
  int classes = 2;
  double separation = 1.0;
  double spread = 1.0;
  double jitter = 0.2;
  // Fraction of class-1 examples for two-class blobs.
  double class_balance = 0.5;
  std::string path;         // csv
  std::string label_column;  // csv: header name or 0-based index; "" = last
  bool csv_header = true;
  std::string idx_images;
  std::string idx_labels;
  // Keep a seeded random subset of this size (0 keeps everything).
  std::size_t subsample = 0;
  // Held-out fraction for kinds that need a test set.
  double test_fraction = 0.5;
};

struct AccountantSettings {
  dp::DpBudget budget{1.0, 1e-5, 0.5};
  dp::CalibrationInputs inputs;
  // Evaluated by the achieved-epsilon inverse when positive.
  double gamma = 0.0;
  double pi = 0.0;
};

struct RademacherSettings {
  std::size_t n = 12;
  std::size_t d = 4;
  double lo = 0.1;
  double hi = 2.0;
  rademacher::ComplexityParams params{1.0, 1.0, 0.5, 1.0};
  std::uint64_t mc_draws = 1'000'000;
  bool force_monte_carlo = false;
  std::uint64_t gbm_paths = 100'000;
  int sup_trials = 10'000;
};

struct SdeSettings {
  std::string image;  // PGM/PPM path; empty uses the built-in pattern
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t channels = 1;
  double gamma = 1.0;
  double dt = 0.01;
  double t_end = 1.0;
  bool multiplicative = false;
};

struct DpsgdSettings {
  double clip_norm = 1.0;
  std::vector<double> noise_multipliers = {1.1};
  std::size_t microbatch_size = 1;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTrain;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = "results";

  DatasetDescriptor dataset;
  model::NetSpec spec;  // input_dim and num_outputs come from the data
  model::NoiseStrategy noise_strategy = model::NoiseStrategy::kNone;
  double noise_gamma = 0.0;
  // Input / output noise scale; negative means gamma / 2.
  double noise_pi = -1.0;
  double noise_eta = 0.1;
  // Gamma values to sweep (empty uses noise_gamma only).
  std::vector<double> gamma_sweep;
  std::size_t ensemble_size = 1;
  // Ensemble sizes to sweep (empty uses ensemble_size only).
  std::vector<std::size_t> ensemble_sizes;
  model::TrainConfig train;
  attack::AttackConfig attack;
  std::vector<double> thresholds = {0.4, 0.5, 0.6, 0.7};
  bool stratified = true;
  std::size_t top_k = 0;
  AccountantSettings accountant;
  RademacherSettings rademacher;
  SdeSettings sde;
  DpsgdSettings dpsgd;

  absl::Status Validate() const;
};

// Noise settings of `config` at noise level `gamma`.
model::NoiseConfig NoiseFor(const ExperimentConfig& config, double gamma);
// The configured sweep, or {noise_gamma} when none is given.
std::vector<double> GammaValues(const ExperimentConfig& config);
std::vector<std::size_t> EnsembleSizes(const ExperimentConfig& config);

// Defaults: desk-scale synthetic task (N=1000, d=20, M=4, 60 epochs).
ExperimentConfig DefaultConfig();

// Parses "key = value" lines onto DefaultConfig(). '#' starts a comment;
// blank lines are ignored. Unknown keys and malformed values are errors
// citing the line number.
absl::StatusOr<ExperimentConfig> ParseConfig(absl::string_view text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);

// Applies one "key=value" assignment.
absl::Status ApplySetting(ExperimentConfig& config, absl::string_view key,
                          absl::string_view value);

// Every key with its resolved value, sorted by key. `include_runtime`
// controls threads and out_dir, which never affect results.
std::map<std::string, std::string> ResolvedSettings(
    const ExperimentConfig& config, bool include_runtime = true);

// ResolvedSettings rendered back into the config file format.
std::string RenderConfig(const ExperimentConfig& config);

// All accepted keys with a one-line description, for --help-config.
std::vector<std::pair<std::string, std::string>> ConfigKeyDocs();

}  // namespace rp::harness

#endif  // RP_EXPERIMENT_HARNESS_CONFIG_H_
