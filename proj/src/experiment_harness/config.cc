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

#include "experiment_harness/config.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "nn_core/format.h"

namespace rp::harness {
namespace {

using Setter = std::function<absl::Status(ExperimentConfig&, absl::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  std::string key;
  std::string doc;
  Getter get;
  Setter set;
  bool runtime = false;
};

absl::Status BadValue(absl::string_view value, absl::string_view want) {
  return absl::InvalidArgumentError(
      absl::StrCat("cannot parse '", value, "' as ", want));
}

absl::Status ParseDouble(absl::string_view v, double* out) {
  if (!absl::SimpleAtod(v, out)) return BadValue(v, "a number");
  return absl::OkStatus();
}

template <typename Int>
absl::Status ParseInt(absl::string_view v, Int* out) {
  if (!absl::SimpleAtoi(v, out)) return BadValue(v, "an integer");
  return absl::OkStatus();
}

absl::Status ParseBool(absl::string_view v, bool* out) {
  const std::string lower = absl::AsciiStrToLower(v);
  if (lower == "true" || lower == "1" || lower == "yes") {
    *out = true;
  } else if (lower == "false" || lower == "0" || lower == "no") {
    *out = false;
  } else {
    return BadValue(v, "a boolean");
  }
  return absl::OkStatus();
}

std::vector<absl::string_view> SplitList(absl::string_view v) {
  std::vector<absl::string_view> out;
  for (absl::string_view item : absl::StrSplit(v, ',', absl::SkipWhitespace())) {
    out.push_back(absl::StripAsciiWhitespace(item));
  }
  return out;
}

std::string Bool(bool b) { return b ? "true" : "false"; }

// Field builders over a member accessor.
template <typename Access>
Field DoubleField(std::string key, std::string doc, Access access) {
  return {std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            return nn::FormatDouble(access(c));
          },
          [access](ExperimentConfig& c, absl::string_view v) {
            return ParseDouble(v, &access(c));
          }};
}

template <typename Access>
Field IntField(std::string key, std::string doc, Access access) {
  return {std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            return absl::StrCat(access(c));
          },
          [access](ExperimentConfig& c, absl::string_view v) {
            return ParseInt(v, &access(c));
          }};
}

template <typename Access>
Field BoolField(std::string key, std::string doc, Access access) {
  return {std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            return Bool(access(c));
          },
          [access](ExperimentConfig& c, absl::string_view v) {
            return ParseBool(v, &access(c));
          }};
}

template <typename Access>
Field StringField(std::string key, std::string doc, Access access) {
  return {std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            return std::string(access(c));
          },
          [access](ExperimentConfig& c, absl::string_view v) {
            access(c) = std::string(v);
            return absl::OkStatus();
          }};
}

template <typename Access>
Field DoubleListField(std::string key, std::string doc, Access access) {
  return {std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            std::vector<std::string> parts;
            for (double v : access(c)) {
              parts.push_back(nn::FormatDouble(v));
            }
            return absl::StrJoin(parts, ",");
          },
          [access](ExperimentConfig& c, absl::string_view v) {
            std::vector<double> values;
            for (absl::string_view item : SplitList(v)) {
              double d;
              if (auto s = ParseDouble(item, &d); !s.ok()) return s;
              values.push_back(d);
            }
            access(c) = std::move(values);
            return absl::OkStatus();
          }};
}

template <typename Access>
Field SizeListField(std::string key, std::string doc, Access access) {
  return {std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            return absl::StrJoin(access(c), ",");
          },
          [access](ExperimentConfig& c, absl::string_view v) {
            std::vector<std::size_t> values;
            for (absl::string_view item : SplitList(v)) {
              std::size_t n;
              if (auto s = ParseInt(item, &n); !s.ok()) return s;
              values.push_back(n);
            }
            access(c) = std::move(values);
            return absl::OkStatus();
          }};
}

template <typename Enum, typename NameFn, typename ParseFn, typename Access>
Field EnumField(std::string key, std::string doc, Access access, NameFn name,
                ParseFn parse) {
  return {std::move(key), std::move(doc),
          [access, name](const ExperimentConfig& c) {
            return std::string(name(access(c)));
          },
          [access, parse](ExperimentConfig& c, absl::string_view v) {
            absl::StatusOr<Enum> parsed = parse(v);
            if (!parsed.ok()) return parsed.status();
            access(c) = *parsed;
            return absl::OkStatus();
          }};
}

#define RP_ACCESS(expr) [](auto& c) -> auto& { return c.expr; }

std::string RenderSchedule(const std::vector<model::LrStep>& steps) {
  std::vector<std::string> parts;
  for (const auto& s : steps) {
    parts.push_back(absl::StrCat(s.epoch, ":", nn::FormatDouble(s.divisor)));
  }
  return absl::StrJoin(parts, ",");
}

const std::vector<Field>& Fields() {
  static const std::vector<Field>* fields = [] {
    auto* f = new std::vector<Field>;
    f->push_back(EnumField<ExperimentKind>(
        "kind",
        "train | attack | accountant | rademacher | sde_demo | dpsgd_compare",
        RP_ACCESS(kind), ExperimentKindName, ParseExperimentKind));
    f->push_back(IntField("seed", "master seed", RP_ACCESS(seed)));
    Field threads = IntField("threads", "worker threads (never changes results)",
                             RP_ACCESS(threads));
    threads.runtime = true;
    f->push_back(threads);
    Field out = StringField("out", "output directory", RP_ACCESS(out_dir));
    out.runtime = true;
    f->push_back(out);

    f->push_back(EnumField<DatasetSource>(
        "dataset.source", "blobs | moons | csv | idx", RP_ACCESS(dataset.source),
        DatasetSourceName, ParseDatasetSource));
    f->push_back(IntField("dataset.n", "synthetic example count",
                          RP_ACCESS(dataset.n)));
    f->push_back(IntField("dataset.dim", "synthetic feature dimension",
                          RP_ACCESS(dataset.dim)));
    f->push_back(IntField("dataset.classes", "blob class count",
                          RP_ACCESS(dataset.classes)));
    f->push_back(DoubleField("dataset.separation", "blob center radius",
                             RP_ACCESS(dataset.separation)));
    f->push_back(DoubleField("dataset.spread", "blob standard deviation",
                             RP_ACCESS(dataset.spread)));
    f->push_back(DoubleField("dataset.jitter", "moons noise level",
                             RP_ACCESS(dataset.jitter)));
    f->push_back(DoubleField("dataset.class_balance",
                             "fraction of class 1 in two-class blobs",
                             RP_ACCESS(dataset.class_balance)));
    f->push_back(StringField("dataset.path", "CSV file", RP_ACCESS(dataset.path)));
    f->push_back(StringField("dataset.label_column",
                             "CSV label column name or index (empty: last)",
                             RP_ACCESS(dataset.label_column)));
    f->push_back(BoolField("dataset.csv_header", "CSV has a header row",
                           RP_ACCESS(dataset.csv_header)));
    f->push_back(StringField("dataset.idx_images", "IDX image file",
                             RP_ACCESS(dataset.idx_images)));
    f->push_back(StringField("dataset.idx_labels", "IDX label file",
                             RP_ACCESS(dataset.idx_labels)));
    f->push_back(IntField("dataset.subsample", "random subset size (0: all)",
                          RP_ACCESS(dataset.subsample)));
    f->push_back(DoubleField("dataset.test_fraction",
                             "held-out fraction for train and dpsgd_compare",
                             RP_ACCESS(dataset.test_fraction)));

    f->push_back(IntField("model.blocks", "residual blocks M",
                          RP_ACCESS(spec.num_blocks)));
    f->push_back(EnumField<model::BlockLayer>(
        "model.layer", "dense | circulant", RP_ACCESS(spec.layer),
        model::BlockLayerName, model::ParseBlockLayer));
    f->push_back(EnumField<nn::ActivationKind>(
        "model.activation", "relu | identity | tanh", RP_ACCESS(spec.activation),
        nn::ActivationName, nn::ParseActivation));
    f->push_back(BoolField("model.batch_norm", "batchnorm in each block",
                           RP_ACCESS(spec.batch_norm)));
    f->push_back(BoolField("model.block_bias", "bias in each block",
                           RP_ACCESS(spec.block_bias)));
    f->push_back(BoolField("model.skip_connections", "identity path per block",
                           RP_ACCESS(spec.skip_connections)));
    f->push_back(DoubleField("model.head_norm_bound",
                             "row norm bound of the head (0: none)",
                             RP_ACCESS(spec.head_norm_bound)));

    f->push_back(EnumField<model::NoiseStrategy>(
        "noise.strategy", "none | additive | multiplicative",
        RP_ACCESS(noise_strategy), model::NoiseStrategyName,
        model::ParseNoiseStrategy));
    f->push_back(DoubleField("noise.gamma", "residual noise level",
                             RP_ACCESS(noise_gamma)));
    f->push_back(DoubleField("noise.pi", "input/output noise (negative: gamma/2)",
                             RP_ACCESS(noise_pi)));
    f->push_back(DoubleField("noise.eta", "multiplicative floor",
                             RP_ACCESS(noise_eta)));
    f->push_back(DoubleListField("noise.gamma_sweep",
                                 "comma-separated gamma values",
                                 RP_ACCESS(gamma_sweep)));
    f->push_back(IntField("ensemble.size", "networks averaged",
                          RP_ACCESS(ensemble_size)));
    f->push_back(SizeListField("ensemble.sizes",
                               "comma-separated ensemble sizes to sweep",
                               RP_ACCESS(ensemble_sizes)));

    f->push_back(IntField("train.epochs", "epochs", RP_ACCESS(train.epochs)));
    f->push_back(IntField("train.batch_size", "minibatch size",
                          RP_ACCESS(train.batch_size)));
    f->push_back(EnumField<nn::OptimizerKind>(
        "train.optimizer", "sgd | adam", RP_ACCESS(train.optimizer.kind),
        nn::OptimizerName, nn::ParseOptimizer));
    f->push_back(DoubleField("train.learning_rate", "initial learning rate",
                             RP_ACCESS(train.optimizer.learning_rate)));
    f->push_back(DoubleField("train.momentum", "SGD momentum",
                             RP_ACCESS(train.optimizer.momentum)));
    f->push_back(Field{
        "train.lr_schedule", "epoch:divisor pairs, e.g. 20:4,40:4",
        [](const ExperimentConfig& c) {
          return RenderSchedule(c.train.lr_schedule);
        },
        [](ExperimentConfig& c, absl::string_view v) {
          std::vector<model::LrStep> steps;
          for (absl::string_view item : SplitList(v)) {
            std::vector<absl::string_view> parts = absl::StrSplit(item, ':');
            model::LrStep step;
            if (parts.size() != 2 || !absl::SimpleAtoi(parts[0], &step.epoch) ||
                !absl::SimpleAtod(parts[1], &step.divisor)) {
              return BadValue(item, "epoch:divisor");
            }
            steps.push_back(step);
          }
          c.train.lr_schedule = std::move(steps);
          return absl::OkStatus();
        }});

    f->push_back(IntField("attack.hidden", "attack hidden width",
                          RP_ACCESS(attack.hidden)));
    f->push_back(IntField("attack.epochs", "attack epochs",
                          RP_ACCESS(attack.epochs)));
    f->push_back(IntField("attack.batch_size", "attack minibatch",
                          RP_ACCESS(attack.batch_size)));
    f->push_back(DoubleField("attack.learning_rate", "attack Adam step",
                             RP_ACCESS(attack.learning_rate)));
    f->push_back(DoubleListField("attack.thresholds", "membership thresholds",
                                 RP_ACCESS(thresholds)));
    f->push_back(BoolField("attack.stratified", "class-stratified split",
                           RP_ACCESS(stratified)));
    f->push_back(IntField("attack.top_k", "top-k features (0: auto)",
                          RP_ACCESS(top_k)));

    f->push_back(DoubleField("accountant.epsilon", "target epsilon",
                             RP_ACCESS(accountant.budget.epsilon)));
    f->push_back(DoubleField("accountant.delta", "target delta",
                             RP_ACCESS(accountant.budget.delta)));
    f->push_back(DoubleField("accountant.lambda", "budget split in (0, 1)",
                             RP_ACCESS(accountant.budget.lambda_split)));
    f->push_back(IntField("accountant.iterations", "training iterations T",
                          RP_ACCESS(accountant.inputs.iterations)));
    f->push_back(IntField("accountant.batch_size", "batch size b",
                          RP_ACCESS(accountant.inputs.batch_size)));
    f->push_back(IntField("accountant.train_size", "training set size N",
                          RP_ACCESS(accountant.inputs.train_size)));
    f->push_back(IntField("accountant.blocks", "residual blocks M",
                          RP_ACCESS(accountant.inputs.num_blocks)));
    f->push_back(DoubleField("accountant.input_bound", "input norm bound R",
                             RP_ACCESS(accountant.inputs.input_bound)));
    f->push_back(DoubleField("accountant.residual_bound",
                             "residual mapping norm bound G",
                             RP_ACCESS(accountant.inputs.residual_bound)));
    f->push_back(DoubleField("accountant.activation_bound",
                             "activation bound B",
                             RP_ACCESS(accountant.inputs.activation_bound)));
    f->push_back(DoubleField("accountant.eta", "multiplicative floor",
                             RP_ACCESS(accountant.inputs.eta)));
    f->push_back(DoubleField("accountant.head_bound", "head norm bound a",
                             RP_ACCESS(accountant.inputs.head_bound)));
    f->push_back(DoubleField("accountant.gamma",
                             "gamma for the achieved-epsilon inverse (0: skip)",
                             RP_ACCESS(accountant.gamma)));
    f->push_back(DoubleField("accountant.pi",
                             "pi for the achieved-epsilon inverse",
                             RP_ACCESS(accountant.pi)));

    f->push_back(IntField("rademacher.n", "sample count N",
                          RP_ACCESS(rademacher.n)));
    f->push_back(IntField("rademacher.d", "sample dimension d",
                          RP_ACCESS(rademacher.d)));
    f->push_back(DoubleField("rademacher.lo", "smallest coordinate",
                             RP_ACCESS(rademacher.lo)));
    f->push_back(DoubleField("rademacher.hi", "largest coordinate",
                             RP_ACCESS(rademacher.hi)));
    f->push_back(DoubleField("rademacher.c", "norm bound c",
                             RP_ACCESS(rademacher.params.c)));
    f->push_back(DoubleField("rademacher.horizon", "time horizon T",
                             RP_ACCESS(rademacher.params.horizon)));
    f->push_back(DoubleField("rademacher.p", "exponent p in (0, 1)",
                             RP_ACCESS(rademacher.params.p)));
    f->push_back(DoubleField("rademacher.gamma", "noise level",
                             RP_ACCESS(rademacher.params.gamma)));
    f->push_back(IntField("rademacher.mc_draws", "Monte-Carlo sign draws",
                          RP_ACCESS(rademacher.mc_draws)));
    f->push_back(BoolField("rademacher.force_mc", "skip enumeration",
                           RP_ACCESS(rademacher.force_monte_carlo)));
    f->push_back(IntField("rademacher.gbm_paths", "paths per GBM check (0: skip)",
                          RP_ACCESS(rademacher.gbm_paths)));
    f->push_back(IntField("rademacher.sup_trials",
                          "random-search trials (0: skip)",
                          RP_ACCESS(rademacher.sup_trials)));

    f->push_back(StringField("sde.image", "PGM/PPM input (empty: pattern)",
                             RP_ACCESS(sde.image)));
    f->push_back(IntField("sde.rows", "pattern rows", RP_ACCESS(sde.rows)));
    f->push_back(IntField("sde.cols", "pattern columns", RP_ACCESS(sde.cols)));
    f->push_back(IntField("sde.channels", "pattern channels (1 or 3)",
                          RP_ACCESS(sde.channels)));
    f->push_back(DoubleField("sde.gamma", "SDE noise level",
                             RP_ACCESS(sde.gamma)));
    f->push_back(DoubleField("sde.dt", "time step", RP_ACCESS(sde.dt)));
    f->push_back(DoubleField("sde.t_end", "integration time",
                             RP_ACCESS(sde.t_end)));
    f->push_back(BoolField("sde.multiplicative",
                           "state-proportional noise in the SDE run",
                           RP_ACCESS(sde.multiplicative)));

    f->push_back(DoubleField("dpsgd.clip_norm", "per-example clip norm C",
                             RP_ACCESS(dpsgd.clip_norm)));
    f->push_back(DoubleListField("dpsgd.noise_multipliers",
                                 "comma-separated noise multipliers",
                                 RP_ACCESS(dpsgd.noise_multipliers)));
    f->push_back(IntField("dpsgd.microbatch_size", "examples per clipped unit",
                          RP_ACCESS(dpsgd.microbatch_size)));
    return f;
  }();
  return *fields;
}

#undef RP_ACCESS

}  // namespace

absl::string_view ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kTrain:
      return "train";
    case ExperimentKind::kAttack:
      return "attack";
    case ExperimentKind::kAccountant:
      return "accountant";
    case ExperimentKind::kRademacher:
      return "rademacher";
    case ExperimentKind::kSdeDemo:
      return "sde_demo";
    case ExperimentKind::kDpsgdCompare:
      return "dpsgd_compare";
  }
  return "unknown";
}

absl::StatusOr<ExperimentKind> ParseExperimentKind(absl::string_view name) {
  std::string key(name);
  for (char& ch : key) {
    if (ch == '-') ch = '_';
  }
  for (ExperimentKind k :
       {ExperimentKind::kTrain, ExperimentKind::kAttack,
        ExperimentKind::kAccountant, ExperimentKind::kRademacher,
        ExperimentKind::kSdeDemo, ExperimentKind::kDpsgdCompare}) {
    if (key == ExperimentKindName(k)) return k;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown experiment kind '", name, "'"));
}

absl::string_view DatasetSourceName(DatasetSource source) {
  switch (source) {
    case DatasetSource::kBlobs:
      return "blobs";
    case DatasetSource::kMoons:
      return "moons";
    case DatasetSource::kCsv:
      return "csv";
    case DatasetSource::kIdx:
      return "idx";
  }
  return "unknown";
}

absl::StatusOr<DatasetSource> ParseDatasetSource(absl::string_view name) {
  for (DatasetSource s : {DatasetSource::kBlobs, DatasetSource::kMoons,
                          DatasetSource::kCsv, DatasetSource::kIdx}) {
    if (name == DatasetSourceName(s)) return s;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown dataset source '", name, "'"));
}

model::NoiseConfig NoiseFor(const ExperimentConfig& config, double gamma) {
  const double pi = config.noise_pi >= 0.0 ? config.noise_pi : gamma / 2.0;
  switch (config.noise_strategy) {
    case model::NoiseStrategy::kNone:
      return model::NoiseConfig::None();
    case model::NoiseStrategy::kAdditive:
      return model::NoiseConfig::Additive(gamma, pi);
    case model::NoiseStrategy::kMultiplicative:
      return model::NoiseConfig::Multiplicative(gamma, pi, config.noise_eta);
  }
  return model::NoiseConfig::None();
}

std::vector<double> GammaValues(const ExperimentConfig& config) {
  if (!config.gamma_sweep.empty()) return config.gamma_sweep;
  return {config.noise_gamma};
}

std::vector<std::size_t> EnsembleSizes(const ExperimentConfig& config) {
  if (!config.ensemble_sizes.empty()) return config.ensemble_sizes;
  return {config.ensemble_size};
}

ExperimentConfig DefaultConfig() {
  ExperimentConfig c;
  c.spec.num_blocks = 4;
  c.train.epochs = 60;
  c.train.batch_size = 32;
  c.train.optimizer.learning_rate = 0.05;
  c.train.optimizer.momentum = 0.9;
  return c;
}

absl::Status ExperimentConfig::Validate() const {
  if (threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  if (!(dataset.test_fraction > 0.0 && dataset.test_fraction < 1.0)) {
    return absl::InvalidArgumentError("dataset.test_fraction must be in (0, 1)");
  }
  if (!(dataset.class_balance > 0.0 && dataset.class_balance < 1.0)) {
    return absl::InvalidArgumentError(
        "dataset.class_balance must be in (0, 1)");
  }
  for (double gamma : GammaValues(*this)) {
    if (!(gamma >= 0.0 && std::isfinite(gamma))) {
      return absl::InvalidArgumentError(
          "noise gamma values must be finite and >= 0");
    }
    if (auto s = NoiseFor(*this, gamma).Validate(); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("noise (gamma ", nn::FormatDouble(gamma), "): ",
                       s.message()));
    }
  }
  if (ensemble_size == 0) {
    return absl::InvalidArgumentError("ensemble.size must be >= 1");
  }
  for (std::size_t k : ensemble_sizes) {
    if (k == 0) return absl::InvalidArgumentError("ensemble sizes must be >= 1");
  }
  for (double g : GammaValues(*this)) {
    if (auto s = NoiseFor(*this, g).Validate(); !s.ok()) return s;
  }
  for (double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) {
      return absl::InvalidArgumentError("thresholds must lie in [0, 1]");
    }
  }
  if (dpsgd.noise_multipliers.empty()) {
    return absl::InvalidArgumentError("dpsgd.noise_multipliers is empty");
  }
  if (auto s = train.Validate(); !s.ok()) return s;
  if (attack.hidden == 0 || attack.epochs < 0 || attack.batch_size == 0 ||
      !(attack.learning_rate > 0.0)) {
    return absl::InvalidArgumentError("invalid attack settings");
  }
  return absl::OkStatus();
}

absl::Status ApplySetting(ExperimentConfig& config, absl::string_view key,
                          absl::string_view value) {
  for (const Field& f : Fields()) {
    if (f.key == key) {
      if (auto s = f.set(config, absl::StripAsciiWhitespace(value)); !s.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("key '", key, "': ", s.message()));
      }
      return absl::OkStatus();
    }
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown key '", key, "'"));
}

absl::StatusOr<ExperimentConfig> ParseConfig(absl::string_view text) {
  ExperimentConfig config = DefaultConfig();
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": expected key = value"));
    }
    const absl::string_view key =
        absl::StripAsciiWhitespace(line.substr(0, eq));
    if (auto s = ApplySetting(config, key, line.substr(eq + 1)); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": ", s.message()));
    }
  }
  return config;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = ParseConfig(buffer.str());
  if (!config.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

std::map<std::string, std::string> ResolvedSettings(
    const ExperimentConfig& config, bool include_runtime) {
  std::map<std::string, std::string> out;
  for (const Field& f : Fields()) {
    if (f.runtime && !include_runtime) continue;
    out[f.key] = f.get(config);
  }
  return out;
}

std::string RenderConfig(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : ResolvedSettings(config)) {
    absl::StrAppend(&out, key, " = ", value, "\n");
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> ConfigKeyDocs() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : Fields()) out.emplace_back(f.key, f.doc);
  return out;
}

}  // namespace rp::harness
