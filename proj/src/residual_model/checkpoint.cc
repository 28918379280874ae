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

#include "residual_model/checkpoint.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace rp::model {
namespace {

constexpr char kMagic[] = "rpnet-checkpoint v1";

std::string Hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

absl::StatusOr<double> ParseHex(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    return absl::DataLossError(absl::StrCat("bad number '", s, "'"));
  }
  return v;
}

// Named tensors of a network in serialization order.
std::vector<std::pair<std::string, nn::Tensor*>> NamedTensors(
    ResidualNet& net) {
  std::vector<std::pair<std::string, nn::Tensor*>> out;
  for (std::size_t i = 0; i < net.blocks().size(); ++i) {
    Block& b = net.blocks()[i];
    const std::string prefix = absl::StrCat("block.", i, ".");
    out.emplace_back(prefix + "linear.weight", &b.linear.weight);
    if (b.linear.bias) out.emplace_back(prefix + "linear.bias", &*b.linear.bias);
    if (b.batch_norm) {
      out.emplace_back(prefix + "bn.gamma", &b.batch_norm->bn_gamma);
      out.emplace_back(prefix + "bn.beta", &b.batch_norm->bn_beta);
      out.emplace_back(prefix + "bn.running_mean",
                       &b.batch_norm->bn_running_mean);
      out.emplace_back(prefix + "bn.running_var",
                       &b.batch_norm->bn_running_var);
    }
  }
  out.emplace_back("head.weight", &net.head().weight);
  return out;
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  absl::StatusOr<std::vector<std::string>> Next() {
    std::string line;
    if (!std::getline(in_, line)) {
      return absl::DataLossError(
          absl::StrCat("checkpoint truncated after line ", line_no_));
    }
    ++line_no_;
    return absl::StrSplit(line, ' ', absl::SkipEmpty());
  }

  absl::Status Error(absl::string_view what) const {
    return absl::DataLossError(
        absl::StrCat("checkpoint line ", line_no_, ": ", what));
  }

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

absl::StatusOr<std::string> Field(const std::vector<std::string>& tokens,
                                  absl::string_view key) {
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    std::pair<std::string, std::string> kv =
        absl::StrSplit(tokens[i], absl::MaxSplits('=', 1));
    if (kv.first == key) return kv.second;
  }
  return absl::DataLossError(absl::StrCat("missing field '", key, "'"));
}

absl::StatusOr<std::uint64_t> ParseU64(const std::string& s) {
  std::uint64_t v = 0;
  if (!absl::SimpleAtoi(s, &v)) {
    return absl::DataLossError(absl::StrCat("bad integer '", s, "'"));
  }
  return v;
}

#define RP_ASSIGN_OR_RETURN(lhs, expr) \
  auto lhs##_or = (expr);              \
  if (!lhs##_or.ok()) return lhs##_or.status(); \
  auto lhs = std::move(*lhs##_or)

absl::StatusOr<ResidualNet> ParseMember(LineReader& reader) {
  RP_ASSIGN_OR_RETURN(spec_line, reader.Next());
  if (spec_line.empty() || spec_line[0] != "spec") {
    return reader.Error("expected 'spec'");
  }
  NetSpec spec;
  RP_ASSIGN_OR_RETURN(input_dim, Field(spec_line, "input_dim"));
  RP_ASSIGN_OR_RETURN(num_blocks, Field(spec_line, "num_blocks"));
  RP_ASSIGN_OR_RETURN(num_outputs, Field(spec_line, "num_outputs"));
  RP_ASSIGN_OR_RETURN(layer, Field(spec_line, "layer"));
  RP_ASSIGN_OR_RETURN(activation, Field(spec_line, "activation"));
  RP_ASSIGN_OR_RETURN(batch_norm, Field(spec_line, "batch_norm"));
  RP_ASSIGN_OR_RETURN(block_bias, Field(spec_line, "block_bias"));
  RP_ASSIGN_OR_RETURN(skip, Field(spec_line, "skip_connections"));
  RP_ASSIGN_OR_RETURN(bound, Field(spec_line, "head_norm_bound"));
  RP_ASSIGN_OR_RETURN(d, ParseU64(input_dim));
  RP_ASSIGN_OR_RETURN(m, ParseU64(num_blocks));
  RP_ASSIGN_OR_RETURN(k, ParseU64(num_outputs));
  RP_ASSIGN_OR_RETURN(layer_kind, ParseBlockLayer(layer));
  RP_ASSIGN_OR_RETURN(act_kind, nn::ParseActivation(activation));
  RP_ASSIGN_OR_RETURN(bound_value, ParseHex(bound));
  spec.input_dim = d;
  spec.num_blocks = m;
  spec.num_outputs = k;
  spec.layer = layer_kind;
  spec.activation = act_kind;
  spec.batch_norm = batch_norm == "1";
  spec.block_bias = block_bias == "1";
  spec.skip_connections = skip == "1";
  spec.head_norm_bound = bound_value;

  RP_ASSIGN_OR_RETURN(noise_line, reader.Next());
  if (noise_line.empty() || noise_line[0] != "noise") {
    return reader.Error("expected 'noise'");
  }
  RP_ASSIGN_OR_RETURN(strategy, Field(noise_line, "strategy"));
  RP_ASSIGN_OR_RETURN(gamma, Field(noise_line, "gamma"));
  RP_ASSIGN_OR_RETURN(pi, Field(noise_line, "pi"));
  RP_ASSIGN_OR_RETURN(eta, Field(noise_line, "eta"));
  NoiseConfig noise;
  RP_ASSIGN_OR_RETURN(strategy_kind, ParseNoiseStrategy(strategy));
  RP_ASSIGN_OR_RETURN(gamma_value, ParseHex(gamma));
  RP_ASSIGN_OR_RETURN(pi_value, ParseHex(pi));
  RP_ASSIGN_OR_RETURN(eta_value, ParseHex(eta));
  noise = {strategy_kind, gamma_value, pi_value, eta_value};

  RP_ASSIGN_OR_RETURN(net, ResidualNet::Create(spec, noise, 0));
  for (auto& [name, tensor] : NamedTensors(net)) {
    RP_ASSIGN_OR_RETURN(tokens, reader.Next());
    if (tokens.size() < 3 || tokens[0] != "tensor" || tokens[1] != name) {
      return reader.Error(absl::StrCat("expected tensor ", name));
    }
    RP_ASSIGN_OR_RETURN(rank, ParseU64(tokens[2]));
    if (rank != tensor->rank() || tokens.size() < 3 + rank) {
      return reader.Error(absl::StrCat("rank mismatch for ", name));
    }
    for (std::size_t a = 0; a < rank; ++a) {
      RP_ASSIGN_OR_RETURN(extent, ParseU64(tokens[3 + a]));
      if (extent != tensor->dim(a)) {
        return reader.Error(absl::StrCat("shape mismatch for ", name));
      }
    }
    if (tokens.size() != 3 + rank + tensor->size()) {
      return reader.Error(absl::StrCat("value count mismatch for ", name));
    }
    for (std::size_t i = 0; i < tensor->size(); ++i) {
      RP_ASSIGN_OR_RETURN(v, ParseHex(tokens[3 + rank + i]));
      (*tensor)[i] = v;
    }
  }
  return net;
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& checkpoint) {
  std::string out = absl::StrCat(kMagic, "\n");
  absl::StrAppend(&out, "master_seed ", checkpoint.master_seed, "\n");
  absl::StrAppend(&out, "members ", checkpoint.ensemble.members.size(), "\n");
  for (const ResidualNet& member : checkpoint.ensemble.members) {
    const NetSpec& s = member.spec();
    absl::StrAppend(&out, "spec input_dim=", s.input_dim,
                    " num_blocks=", s.num_blocks,
                    " num_outputs=", s.num_outputs,
                    " layer=", BlockLayerName(s.layer),
                    " activation=", nn::ActivationName(s.activation),
                    " batch_norm=", s.batch_norm ? 1 : 0,
                    " block_bias=", s.block_bias ? 1 : 0,
                    " skip_connections=", s.skip_connections ? 1 : 0,
                    " head_norm_bound=", Hex(s.head_norm_bound), "\n");
    const NoiseConfig& n = member.noise();
    absl::StrAppend(&out, "noise strategy=", NoiseStrategyName(n.strategy),
                    " gamma=", Hex(n.gamma), " pi=", Hex(n.pi),
                    " eta=", Hex(n.eta), "\n");
    ResidualNet& mutable_member = const_cast<ResidualNet&>(member);
    for (const auto& [name, tensor] : NamedTensors(mutable_member)) {
      absl::StrAppend(&out, "tensor ", name, " ", tensor->rank());
      for (std::size_t extent : tensor->shape()) {
        absl::StrAppend(&out, " ", extent);
      }
      for (double v : tensor->values()) absl::StrAppend(&out, " ", Hex(v));
      out += "\n";
    }
  }
  out += "end\n";
  return out;
}

absl::StatusOr<Checkpoint> ParseCheckpoint(const std::string& text) {
  LineReader reader(text);
  RP_ASSIGN_OR_RETURN(magic, reader.Next());
  if (magic.size() != 2 || absl::StrCat(magic[0], " ", magic[1]) != kMagic) {
    return absl::DataLossError("not an rpnet checkpoint");
  }
  Checkpoint checkpoint;
  RP_ASSIGN_OR_RETURN(seed_line, reader.Next());
  if (seed_line.size() != 2 || seed_line[0] != "master_seed") {
    return reader.Error("expected 'master_seed'");
  }
  RP_ASSIGN_OR_RETURN(seed, ParseU64(seed_line[1]));
  checkpoint.master_seed = seed;
  RP_ASSIGN_OR_RETURN(members_line, reader.Next());
  if (members_line.size() != 2 || members_line[0] != "members") {
    return reader.Error("expected 'members'");
  }
  RP_ASSIGN_OR_RETURN(k, ParseU64(members_line[1]));
  if (k == 0) return reader.Error("members must be >= 1");
  for (std::uint64_t i = 0; i < k; ++i) {
    RP_ASSIGN_OR_RETURN(net, ParseMember(reader));
    checkpoint.ensemble.members.push_back(std::move(net));
  }
  RP_ASSIGN_OR_RETURN(end, reader.Next());
  if (end.size() != 1 || end[0] != "end") return reader.Error("expected 'end'");
  return checkpoint;
}

absl::Status SaveCheckpoint(const Checkpoint& checkpoint,
                            const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", tmp));
    out << SerializeCheckpoint(checkpoint);
    if (!out.flush()) {
      return absl::UnavailableError(absl::StrCat("write failed: ", tmp));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("rename ", tmp, " -> ", path, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<Checkpoint> LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCheckpoint(buffer.str());
}

}  // namespace rp::model
