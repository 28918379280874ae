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

#include "residual_model/residual_net.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace rp::model {
namespace {

using nn::LayerCache;
using nn::LayerGrads;
using nn::LayerParams;
using nn::Tensor;

Tensor SliceRow(const Tensor& t, std::size_t n) {
  if (t.empty()) return t;
  return nn::AsBatch(t.row(n));
}

LayerCache SliceCache(const LayerCache& c, std::size_t n) {
  LayerCache out;
  out.mode = c.mode;
  out.input = SliceRow(c.input, n);
  out.normalized = SliceRow(c.normalized, n);
  out.inv_std = c.inv_std;
  out.clamped = c.clamped;
  return out;
}

// Number of trainable tensors contributed by a layer.
void AppendParams(LayerParams& p, std::vector<Tensor*>* out) {
  switch (p.kind) {
    case nn::LayerKind::kDense:
    case nn::LayerKind::kCirculant:
      out->push_back(&p.weight);
      if (p.bias) out->push_back(&*p.bias);
      break;
    case nn::LayerKind::kBatchNorm:
      out->push_back(&p.bn_gamma);
      out->push_back(&p.bn_beta);
      break;
    case nn::LayerKind::kActivation:
      break;
  }
}

// Adds layer gradients into the flat list starting at *index.
void AddGrads(const LayerParams& p, const LayerGrads& g,
              std::vector<Tensor>* grads, std::size_t* index) {
  auto add = [&](const Tensor& src) {
    auto dst = (*grads)[(*index)++].values();
    const auto s = src.values();
    for (std::size_t i = 0; i < s.size(); ++i) dst[i] += s[i];
  };
  switch (p.kind) {
    case nn::LayerKind::kDense:
    case nn::LayerKind::kCirculant:
      add(g.weight);
      if (p.bias) add(g.bias);
      break;
    case nn::LayerKind::kBatchNorm:
      add(g.bn_gamma);
      add(g.bn_beta);
      break;
    case nn::LayerKind::kActivation:
      break;
  }
}

std::size_t ParamCount(const LayerParams& p) {
  switch (p.kind) {
    case nn::LayerKind::kDense:
    case nn::LayerKind::kCirculant:
      return p.bias ? 2 : 1;
    case nn::LayerKind::kBatchNorm:
      return 2;
    case nn::LayerKind::kActivation:
      return 0;
  }
  return 0;
}

}  // namespace

absl::string_view BlockLayerName(BlockLayer layer) {
  return layer == BlockLayer::kDense ? "dense" : "circulant";
}

absl::StatusOr<BlockLayer> ParseBlockLayer(absl::string_view name) {
  if (name == "dense") return BlockLayer::kDense;
  if (name == "circulant") return BlockLayer::kCirculant;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown block layer '", name, "'"));
}

absl::Status NetSpec::Validate() const {
  if (input_dim == 0) return absl::InvalidArgumentError("input_dim must be >= 1");
  if (num_blocks == 0) return absl::InvalidArgumentError("num_blocks must be >= 1");
  if (num_outputs == 0) {
    return absl::InvalidArgumentError("num_outputs must be >= 1");
  }
  if (!(head_norm_bound >= 0.0) || !std::isfinite(head_norm_bound)) {
    return absl::InvalidArgumentError("head_norm_bound must be finite and >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<Tensor> ResidualBlockForward(const Tensor& x, Block& block,
                                            const NoiseConfig& noise,
                                            bool skip_connections,
                                            nn::Rng& rng, nn::Mode mode,
                                            BlockCache* cache) {
  LayerCache* lc = cache ? &cache->linear : nullptr;
  LayerCache* ac = cache ? &cache->activation : nullptr;
  LayerCache* bc = cache ? &cache->batch_norm : nullptr;
  auto z = nn::LayerForward(x, mode, &block.linear, lc);
  if (!z.ok()) return z.status();
  auto phi = nn::LayerForward(*z, mode, &block.activation, ac);
  if (!phi.ok()) return phi.status();
  if (block.batch_norm) {
    phi = nn::LayerForward(*phi, mode, &*block.batch_norm, bc);
    if (!phi.ok()) return phi.status();
  }
  Tensor out = std::move(*phi);
  if (skip_connections) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += x[i];
  }
  Tensor draws;
  if (noise.gamma > 0.0 && noise.strategy != NoiseStrategy::kNone) {
    draws = Tensor(x.shape());
    rng.FillNormal(draws.values());
    if (noise.strategy == NoiseStrategy::kAdditive) {
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += noise.gamma * draws[i];
      }
    } else {
      for (std::size_t n = 0; n < x.rows(); ++n) {
        const auto clipped = ClipAwayFromZero(x.row(n), noise.eta);
        auto o = out.row(n);
        const auto e = draws.row(n);
        for (std::size_t j = 0; j < o.size(); ++j) {
          o[j] += noise.gamma * clipped[j] * e[j];
        }
      }
    }
  }
  if (cache) {
    cache->input = x;
    cache->noise = std::move(draws);
  }
  return out;
}

ResidualNet::ForwardCache ResidualNet::ForwardCache::Row(std::size_t n) const {
  ForwardCache out;
  out.input_noise = SliceRow(input_noise, n);
  out.blocks.reserve(blocks.size());
  for (const BlockCache& b : blocks) {
    BlockCache s;
    s.linear = SliceCache(b.linear, n);
    s.activation = SliceCache(b.activation, n);
    s.batch_norm = SliceCache(b.batch_norm, n);
    s.input = SliceRow(b.input, n);
    s.noise = SliceRow(b.noise, n);
    out.blocks.push_back(std::move(s));
  }
  out.head = SliceCache(head, n);
  out.features = SliceRow(features, n);
  out.output_noise = SliceRow(output_noise, n);
  return out;
}

absl::StatusOr<ResidualNet> ResidualNet::Create(const NetSpec& spec,
                                                const NoiseConfig& noise,
                                                std::uint64_t init_seed) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  if (auto s = noise.Validate(); !s.ok()) return s;
  ResidualNet net;
  net.spec_ = spec;
  net.noise_ = noise;
  nn::Rng rng(init_seed);
  const std::size_t d = spec.input_dim;
  for (std::size_t i = 0; i < spec.num_blocks; ++i) {
    Block block;
    block.linear = spec.layer == BlockLayer::kDense
                       ? nn::MakeDense(d, d, spec.block_bias, rng)
                       : nn::MakeCirculant(d, spec.block_bias, rng);
    block.activation = nn::MakeActivation(spec.activation);
    if (spec.batch_norm) block.batch_norm = nn::MakeBatchNorm(d);
    net.blocks_.push_back(std::move(block));
  }
  net.head_ = nn::MakeDense(d, spec.num_outputs, /*with_bias=*/false, rng);
  net.ProjectHead();
  return net;
}

absl::Status ResidualNet::set_noise(const NoiseConfig& noise) {
  if (auto s = noise.Validate(); !s.ok()) return s;
  noise_ = noise;
  return absl::OkStatus();
}

absl::StatusOr<Tensor> ResidualNet::Forward(const Tensor& x, nn::Mode mode,
                                            nn::Rng& rng,
                                            ForwardCache* cache) {
  if (x.rank() != 2 || x.cols() != spec_.input_dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("input ", x.ShapeString(), " does not have width ",
                     spec_.input_dim));
  }
  Tensor h = x;
  Tensor input_noise;
  if (noise_.strategy == NoiseStrategy::kAdditive && noise_.pi > 0.0) {
    input_noise = Tensor(x.shape());
    rng.FillNormal(input_noise.values());
    for (std::size_t i = 0; i < h.size(); ++i) {
      h[i] += noise_.pi * input_noise[i];
    }
  }
  if (cache) {
    cache->input_noise = std::move(input_noise);
    cache->blocks.assign(blocks_.size(), BlockCache{});
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    auto next = ResidualBlockForward(h, blocks_[i], noise_,
                                     spec_.skip_connections, rng, mode,
                                     cache ? &cache->blocks[i] : nullptr);
    if (!next.ok()) return next.status();
    h = std::move(*next);
  }
  auto logits = nn::LayerForward(h, mode, &head_, cache ? &cache->head : nullptr);
  if (!logits.ok()) return logits.status();
  Tensor output_noise;
  if (noise_.strategy == NoiseStrategy::kMultiplicative && noise_.pi > 0.0) {
    output_noise = Tensor(logits->shape());
    rng.FillNormal(output_noise.values());
    for (std::size_t n = 0; n < h.rows(); ++n) {
      const double scale = noise_.pi * nn::Norm2(h.row(n));
      auto row = logits->row(n);
      const auto e = output_noise.row(n);
      for (std::size_t k = 0; k < row.size(); ++k) row[k] += scale * e[k];
    }
  }
  if (cache) {
    cache->features = std::move(h);
    cache->output_noise = std::move(output_noise);
  }
  return logits;
}

std::vector<Tensor*> ResidualNet::Parameters() {
  std::vector<Tensor*> out;
  for (Block& b : blocks_) {
    AppendParams(b.linear, &out);
    if (b.batch_norm) AppendParams(*b.batch_norm, &out);
  }
  AppendParams(head_, &out);
  return out;
}

std::vector<const Tensor*> ResidualNet::Parameters() const {
  auto mutable_params = const_cast<ResidualNet*>(this)->Parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::vector<Tensor> ResidualNet::ZeroGradients() const {
  std::vector<Tensor> out;
  for (const Tensor* p : Parameters()) out.emplace_back(p->shape());
  return out;
}

absl::Status ResidualNet::Backward(const ForwardCache& cache,
                                   const Tensor& grad_logits,
                                   std::vector<Tensor>* grads) const {
  const std::size_t count = Parameters().size();
  if (grads->size() != count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", count, " gradient tensors, got ", grads->size()));
  }
  if (cache.blocks.size() != blocks_.size() ||
      !grad_logits.SameShape(Tensor::Matrix(cache.features.rows(),
                                            spec_.num_outputs))) {
    return absl::InvalidArgumentError("cache does not match this network");
  }
  // Head.
  LayerGrads head_grads = nn::ZeroGrads(head_);
  Tensor g = nn::LayerBackward(head_, cache.head, grad_logits, &head_grads);
  std::size_t index = count - ParamCount(head_);
  AddGrads(head_, head_grads, grads, &index);
  if (!cache.output_noise.empty()) {
    for (std::size_t n = 0; n < g.rows(); ++n) {
      const auto h = cache.features.row(n);
      const double norm = nn::Norm2(h);
      if (norm == 0.0) continue;
      double coeff = 0.0;
      const auto e = cache.output_noise.row(n);
      const auto gl = grad_logits.row(n);
      for (std::size_t k = 0; k < e.size(); ++k) coeff += gl[k] * e[k];
      coeff *= noise_.pi / norm;
      auto gr = g.row(n);
      for (std::size_t j = 0; j < gr.size(); ++j) gr[j] += coeff * h[j];
    }
  }
  // Blocks in reverse; parameter slots are laid out block by block.
  std::vector<std::size_t> offsets(blocks_.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    offsets[i] = offset;
    offset += ParamCount(blocks_[i].linear) +
              (blocks_[i].batch_norm ? ParamCount(*blocks_[i].batch_norm) : 0);
  }
  for (std::size_t i = blocks_.size(); i-- > 0;) {
    const Block& block = blocks_[i];
    const BlockCache& bc = cache.blocks[i];
    Tensor gx = spec_.skip_connections ? g : Tensor(g.shape());
    if (!bc.noise.empty() &&
        noise_.strategy == NoiseStrategy::kMultiplicative) {
      for (std::size_t k = 0; k < gx.size(); ++k) {
        if (std::abs(bc.input[k]) > noise_.eta) {
          gx[k] += noise_.gamma * bc.noise[k] * g[k];
        }
      }
    }
    Tensor gphi = g;
    LayerGrads bn_grads;
    if (block.batch_norm) {
      bn_grads = nn::ZeroGrads(*block.batch_norm);
      gphi = nn::LayerBackward(*block.batch_norm, bc.batch_norm, gphi,
                               &bn_grads);
    }
    LayerGrads act_grads;
    gphi = nn::LayerBackward(block.activation, bc.activation, gphi, &act_grads);
    LayerGrads lin_grads = nn::ZeroGrads(block.linear);
    Tensor glin = nn::LayerBackward(block.linear, bc.linear, gphi, &lin_grads);
    std::size_t slot = offsets[i];
    AddGrads(block.linear, lin_grads, grads, &slot);
    if (block.batch_norm) AddGrads(*block.batch_norm, bn_grads, grads, &slot);
    for (std::size_t k = 0; k < gx.size(); ++k) gx[k] += glin[k];
    g = std::move(gx);
  }
  return absl::OkStatus();
}

void ResidualNet::ProjectHead() {
  const double a = spec_.head_norm_bound;
  if (a <= 0.0) return;
  for (std::size_t k = 0; k < head_.weight.rows(); ++k) {
    auto row = head_.weight.row(k);
    const double norm = nn::Norm2(row);
    if (norm > a) {
      const double scale = a / norm;
      for (double& w : row) w *= scale;
    }
  }
}

double ResidualNet::HeadNorm() const {
  double best = 0.0;
  for (std::size_t k = 0; k < head_.weight.rows(); ++k) {
    best = std::max(best, nn::Norm2(head_.weight.row(k)));
  }
  return best;
}

std::vector<int> PredictLabels(const Tensor& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t n = 0; n < scores.rows(); ++n) {
    const auto row = scores.row(n);
    out[n] = static_cast<int>(std::max_element(row.begin(), row.end()) -
                              row.begin());
  }
  return out;
}

}  // namespace rp::model
