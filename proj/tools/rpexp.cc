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

// rpexp: command-line front end for the experiment harness.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "experiment_harness/config.h"
#include "experiment_harness/runner.h"

namespace {

using rp::harness::ExperimentConfig;
using rp::harness::ExperimentKind;

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 0;
  std::vector<std::string> settings;
  bool print_config = false;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("-c,--config", flags->config_path,
                  "key = value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--seed", flags->seed, "master seed");
  cmd->add_option("-o,--out", flags->out_dir, "output directory");
  cmd->add_option("-t,--threads", flags->threads, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--set", flags->settings,
                  "override a config key, e.g. --set noise.gamma=0.5");
  cmd->add_flag("--print-config", flags->print_config,
                "print the resolved config and exit");
}

int Fail(const absl::Status& status) {
  std::cerr << "rpexp: " << status.message() << "\n";
  return 1;
}

absl::StatusOr<ExperimentConfig> Resolve(const CommonFlags& flags,
                                         ExperimentKind kind,
                                         const CLI::App& cmd) {
  ExperimentConfig config = rp::harness::DefaultConfig();
  if (!flags.config_path.empty()) {
    auto loaded = rp::harness::LoadConfig(flags.config_path);
    if (!loaded.ok()) {
      return absl::Status(loaded.status().code(),
                          absl::StrCat("config: ", flags.config_path, ": ",
                                       loaded.status().message()));
    }
    config = *std::move(loaded);
  }
  config.kind = kind;
  for (const std::string& setting : flags.settings) {
    const auto eq = setting.find('=');
    if (eq == std::string::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config: --set ", setting, ": expected key=value"));
    }
    if (auto s = rp::harness::ApplySetting(config, setting.substr(0, eq),
                                           setting.substr(eq + 1));
        !s.ok()) {
      return absl::Status(s.code(), absl::StrCat("config: --set ", setting,
                                                 ": ", s.message()));
    }
  }
  if (cmd.count("--seed") > 0) config.seed = flags.seed;
  if (cmd.count("--out") > 0) config.out_dir = flags.out_dir;
  if (cmd.count("--threads") > 0) config.threads = flags.threads;
  if (auto s = config.Validate(); !s.ok()) {
    return absl::Status(s.code(), absl::StrCat("config: ", s.message()));
  }
  return config;
}

int Run(const CommonFlags& flags, ExperimentKind kind, const CLI::App& cmd) {
  auto config = Resolve(flags, kind, cmd);
  if (!config.ok()) return Fail(config.status());
  if (flags.print_config) {
    std::cout << rp::harness::RenderConfig(*config);
    return 0;
  }
  std::vector<std::string> manifest;
  auto record = rp::harness::RunAndWrite(*config, &manifest);
  if (!record.ok()) return Fail(record.status());
  for (const auto& note : record->notes) std::cerr << "note: " << note << "\n";
  std::cout << record->metrics.dump(2) << "\n";
  std::cerr << "wrote " << manifest.size() << " files to " << config->out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual perturbation experiments"};
  app.require_subcommand(1);
  struct Command {
    const char* name;
    ExperimentKind kind;
    const char* help;
  };
  const std::vector<Command> commands = {
      {"train", ExperimentKind::kTrain, "train noisy residual ensembles"},
      {"attack", ExperimentKind::kAttack,
       "shadow-model membership inference sweep"},
      {"accountant", ExperimentKind::kAccountant,
       "calibrate noise for an (epsilon, delta) budget"},
      {"rademacher", ExperimentKind::kRademacher,
       "Rademacher complexity of ODE vs SDE linear models"},
      {"sde-demo", ExperimentKind::kSdeDemo,
       "forward/backward image flow with and without noise"},
      {"dpsgd-compare", ExperimentKind::kDpsgdCompare,
       "residual perturbation vs DPSGD under the same attack"},
  };
  std::vector<CommonFlags> flags(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].name, commands[i].help);
    AddCommonFlags(sub, &flags[i]);
    subs.push_back(sub);
  }
  CLI::App* keys = app.add_subcommand("keys", "list config keys");
  CLI11_PARSE(app, argc, argv);

  if (keys->parsed()) {
    for (const auto& [key, doc] : rp::harness::ConfigKeyDocs()) {
      std::printf("%-32s %s\n", key.c_str(), doc.c_str());
    }
    return 0;
  }
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (subs[i]->parsed()) return Run(flags[i], commands[i].kind, *subs[i]);
  }
  return 2;
}
