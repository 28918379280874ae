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

#ifndef RP_RESIDUAL_MODEL_RESIDUAL_NET_H_
#define RP_RESIDUAL_MODEL_RESIDUAL_NET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nn_core/layers.h"
#include "nn_core/rng.h"
#include "nn_core/tensor.h"
#include "residual_model/noise.h"

namespace rp::model {

enum class BlockLayer { kDense, kCirculant };

absl::string_view BlockLayerName(BlockLayer layer);
absl::StatusOr<BlockLayer> ParseBlockLayer(absl::string_view name);

// Architecture of a residual network: M blocks of width d followed by a
// bias-free linear head with K outputs.
struct NetSpec {
  std::size_t input_dim = 0;
  std::size_t num_blocks = 1;
  std::size_t num_outputs = 2;
  BlockLayer layer = BlockLayer::kDense;
  nn::ActivationKind activation = nn::ActivationKind::kRelu;
  bool batch_norm = true;
  bool block_bias = false;
  // false replaces x + phi(Ux) by phi(Ux).
  bool skip_connections = true;
  // When positive every head row is projected onto the ball of this radius
  // after each optimizer step.
  double head_norm_bound = 0.0;

  absl::Status Validate() const;
};

// One residual mapping phi(Ux) = BN(act(Ux)).
struct Block {
  nn::LayerParams linear;
  nn::LayerParams activation;
  std::optional<nn::LayerParams> batch_norm;
};

// Intermediate values of one block, kept for the backward pass.
struct BlockCache {
  nn::LayerCache linear;
  nn::LayerCache activation;
  nn::LayerCache batch_norm;
  nn::Tensor input;
  nn::Tensor noise;  // standard normal draws, empty when none were taken
};

// Applies one perturbed residual block to a batch.
absl::StatusOr<nn::Tensor> ResidualBlockForward(const nn::Tensor& x,
                                                Block& block,
                                                const NoiseConfig& noise,
                                                bool skip_connections,
                                                nn::Rng& rng, nn::Mode mode,
                                                BlockCache* cache);

class ResidualNet {
 public:
  struct ForwardCache {
    nn::Tensor input_noise;
    std::vector<BlockCache> blocks;
    nn::LayerCache head;
    nn::Tensor features;      // x_M
    nn::Tensor output_noise;  // multiplicative strategy only

    // Slice holding example `n` only. Valid for nets without batchnorm.
    ForwardCache Row(std::size_t n) const;
  };

  ResidualNet() = default;

  // Initializes weights from `init_seed`.
  static absl::StatusOr<ResidualNet> Create(const NetSpec& spec,
                                            const NoiseConfig& noise,
                                            std::uint64_t init_seed);

  const NetSpec& spec() const { return spec_; }
  const NoiseConfig& noise() const { return noise_; }
  absl::Status set_noise(const NoiseConfig& noise);
  std::vector<Block>& blocks() { return blocks_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  nn::LayerParams& head() { return head_; }
  const nn::LayerParams& head() const { return head_; }
  bool has_batch_norm() const { return spec_.batch_norm; }

  // Maps a batch (N x d) to logits (N x K). Noise is drawn from `rng` in both
  // modes. Train mode updates batchnorm running statistics.
  absl::StatusOr<nn::Tensor> Forward(const nn::Tensor& x, nn::Mode mode,
                                     nn::Rng& rng,
                                     ForwardCache* cache = nullptr);

  // Trainable tensors in a fixed order: per block the linear weight, its
  // bias, batchnorm gamma and beta (those present), then the head weight.
  std::vector<nn::Tensor*> Parameters();
  std::vector<const nn::Tensor*> Parameters() const;
  std::vector<nn::Tensor> ZeroGradients() const;

  // Adds d(sum of losses)/d(params) into `grads` given d(loss)/d(logits).
  absl::Status Backward(const ForwardCache& cache,
                        const nn::Tensor& grad_logits,
                        std::vector<nn::Tensor>* grads) const;

  // Row-wise projection of the head onto the head_norm_bound ball.
  void ProjectHead();
  // Largest head row norm.
  double HeadNorm() const;

 private:
  NetSpec spec_;
  NoiseConfig noise_;
  std::vector<Block> blocks_;
  nn::LayerParams head_;
};

// Argmax of each row.
std::vector<int> PredictLabels(const nn::Tensor& scores);

}  // namespace rp::model

#endif  // RP_RESIDUAL_MODEL_RESIDUAL_NET_H_
