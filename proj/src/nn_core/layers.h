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

#ifndef RP_NN_CORE_LAYERS_H_
#define RP_NN_CORE_LAYERS_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nn_core/rng.h"
#include "nn_core/tensor.h"

namespace rp::nn {

enum class LayerKind { kDense, kCirculant, kBatchNorm, kActivation };
enum class ActivationKind { kRelu, kIdentity, kTanh };
enum class Mode { kTrain, kEval };

inline constexpr double kBatchNormVarianceFloor = 1e-12;
inline constexpr double kBatchNormMomentum = 0.1;

absl::string_view ActivationName(ActivationKind kind);
absl::StatusOr<ActivationKind> ParseActivation(absl::string_view name);

// Parameters of one layer. Which fields are meaningful depends on `kind`:
//   dense      weight (out x in), optional bias (out)
//   circulant  weight (d) holding the first row, optional bias (d)
//   batchnorm  bn_gamma, bn_beta, bn_running_mean, bn_running_var (all d)
//   activation activation, lipschitz_constant
struct LayerParams {
  LayerKind kind = LayerKind::kActivation;
  Tensor weight;
  std::optional<Tensor> bias;
  Tensor bn_gamma;
  Tensor bn_beta;
  Tensor bn_running_mean;
  Tensor bn_running_var;
  ActivationKind activation = ActivationKind::kRelu;
  double lipschitz_constant = 1.0;

  // Width of the input/output for this layer. Activation layers report 0
  // (any width).
  std::size_t InputDim() const;
  std::size_t OutputDim() const;
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], bias zero.
LayerParams MakeDense(std::size_t in_dim, std::size_t out_dim, bool with_bias,
                      Rng& rng);
LayerParams MakeCirculant(std::size_t dim, bool with_bias, Rng& rng);
// gamma = 1, beta = 0, running mean 0, running variance 1.
LayerParams MakeBatchNorm(std::size_t dim);
LayerParams MakeActivation(ActivationKind kind);

// Activations cached by LayerForward for the backward pass.
struct LayerCache {
  Mode mode = Mode::kEval;
  Tensor input;
  Tensor normalized;            // batchnorm x-hat
  std::vector<double> inv_std;  // batchnorm 1/sqrt(var) per coordinate
  std::vector<bool> clamped;    // batchnorm variance hit the floor
};

// Gradient accumulators shaped like the trainable tensors of a layer.
struct LayerGrads {
  Tensor weight;
  Tensor bias;
  Tensor bn_gamma;
  Tensor bn_beta;
};
LayerGrads ZeroGrads(const LayerParams& params);

// Forward pass over a batch (rows are examples). Batchnorm in train mode
// normalizes with batch statistics and updates the running statistics in
// `params`; in eval mode it uses the running statistics and leaves `params`
// untouched. `cache` may be null when no backward pass follows.
absl::StatusOr<Tensor> LayerForward(const Tensor& x, Mode mode,
                                    LayerParams* params, LayerCache* cache);

// Backward pass. Adds parameter gradients into `grads` (summed over the
// batch, unscaled) and returns the gradient with respect to the layer input.
// Parameter contributions are accumulated example by example, so a batch
// gradient equals the in-order sum of single-example gradients bit for bit
// for every layer kind except batchnorm in train mode.
Tensor LayerBackward(const LayerParams& params, const LayerCache& cache,
                     const Tensor& grad_out, LayerGrads* grads);

double ApplyActivation(ActivationKind kind, double z);
double ActivationDerivative(ActivationKind kind, double z);

}  // namespace rp::nn

#endif  // RP_NN_CORE_LAYERS_H_
