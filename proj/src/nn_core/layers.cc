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

#include "nn_core/layers.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace rp::nn {
namespace {

absl::Status ShapeError(absl::string_view what, const Tensor& x,
                        std::size_t expected) {
  return absl::InvalidArgumentError(
      absl::StrCat(what, ": input ", x.ShapeString(), " needs ", expected,
                   " columns"));
}

Tensor DenseForward(const LayerParams& p, const Tensor& x) {
  const std::size_t out = p.weight.rows();
  const std::size_t in = p.weight.cols();
  Tensor y = Tensor::Matrix(x.rows(), out);
  for (std::size_t n = 0; n < x.rows(); ++n) {
    const auto xr = x.row(n);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = p.bias ? (*p.bias)[o] : 0.0;
      const double* w = &p.weight.storage()[o * in];
      for (std::size_t i = 0; i < in; ++i) acc += w[i] * xr[i];
      y.at(n, o) = acc;
    }
  }
  return y;
}

Tensor CirculantForward(const LayerParams& p, const Tensor& x) {
  const std::size_t d = p.weight.size();
  const auto& a = p.weight.storage();
  Tensor y = Tensor::Matrix(x.rows(), d);
  for (std::size_t n = 0; n < x.rows(); ++n) {
    const auto xr = x.row(n);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = p.bias ? (*p.bias)[i] : 0.0;
      // C[i][j] = a[(j - i) mod d]
      for (std::size_t k = 0; k < d; ++k) acc += a[k] * xr[(i + k) % d];
      y.at(n, i) = acc;
    }
  }
  return y;
}

Tensor BatchNormForward(const Tensor& x, Mode mode, LayerParams* p,
                        LayerCache* cache) {
  const std::size_t b = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0), var(d, 0.0), inv_std(d);
  std::vector<bool> clamped(d, false);
  if (mode == Mode::kTrain) {
    for (std::size_t n = 0; n < b; ++n) {
      for (std::size_t j = 0; j < d; ++j) mean[j] += x.at(n, j);
    }
    for (double& m : mean) m /= static_cast<double>(b);
    for (std::size_t n = 0; n < b; ++n) {
      for (std::size_t j = 0; j < d; ++j) {
        const double c = x.at(n, j) - mean[j];
        var[j] += c * c;
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      var[j] /= static_cast<double>(b);
      p->bn_running_mean[j] = (1.0 - kBatchNormMomentum) *
                                  p->bn_running_mean[j] +
                              kBatchNormMomentum * mean[j];
      p->bn_running_var[j] =
          (1.0 - kBatchNormMomentum) * p->bn_running_var[j] +
          kBatchNormMomentum * std::max(var[j], kBatchNormVarianceFloor);
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      mean[j] = p->bn_running_mean[j];
      var[j] = p->bn_running_var[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (var[j] < kBatchNormVarianceFloor) {
      var[j] = kBatchNormVarianceFloor;
      clamped[j] = true;
    }
    inv_std[j] = 1.0 / std::sqrt(var[j]);
  }
  Tensor normalized = Tensor::Matrix(b, d);
  Tensor y = Tensor::Matrix(b, d);
  for (std::size_t n = 0; n < b; ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      const double xh = (x.at(n, j) - mean[j]) * inv_std[j];
      normalized.at(n, j) = xh;
      y.at(n, j) = p->bn_gamma[j] * xh + p->bn_beta[j];
    }
  }
  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
    cache->clamped = std::move(clamped);
  }
  return y;
}

}  // namespace

absl::string_view ActivationName(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kRelu:
      return "relu";
    case ActivationKind::kIdentity:
      return "identity";
    case ActivationKind::kTanh:
      return "tanh";
  }
  return "unknown";
}

absl::StatusOr<ActivationKind> ParseActivation(absl::string_view name) {
  if (name == "relu") return ActivationKind::kRelu;
  if (name == "identity") return ActivationKind::kIdentity;
  if (name == "tanh") return ActivationKind::kTanh;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown activation '", name, "'"));
}

std::size_t LayerParams::InputDim() const {
  switch (kind) {
    case LayerKind::kDense:
      return weight.cols();
    case LayerKind::kCirculant:
      return weight.size();
    case LayerKind::kBatchNorm:
      return bn_gamma.size();
    case LayerKind::kActivation:
      return 0;
  }
  return 0;
}

std::size_t LayerParams::OutputDim() const {
  return kind == LayerKind::kDense ? weight.rows() : InputDim();
}

LayerParams MakeDense(std::size_t in_dim, std::size_t out_dim, bool with_bias,
                      Rng& rng) {
  LayerParams p;
  p.kind = LayerKind::kDense;
  p.weight = Tensor::Matrix(out_dim, in_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (double& w : p.weight.values()) w = rng.Uniform(-bound, bound);
  if (with_bias) p.bias = Tensor({out_dim});
  return p;
}

LayerParams MakeCirculant(std::size_t dim, bool with_bias, Rng& rng) {
  LayerParams p;
  p.kind = LayerKind::kCirculant;
  p.weight = Tensor({dim});
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& w : p.weight.values()) w = rng.Uniform(-bound, bound);
  if (with_bias) p.bias = Tensor({dim});
  return p;
}

LayerParams MakeBatchNorm(std::size_t dim) {
  LayerParams p;
  p.kind = LayerKind::kBatchNorm;
  p.bn_gamma = Tensor({dim}, 1.0);
  p.bn_beta = Tensor({dim}, 0.0);
  p.bn_running_mean = Tensor({dim}, 0.0);
  p.bn_running_var = Tensor({dim}, 1.0);
  return p;
}

LayerParams MakeActivation(ActivationKind kind) {
  LayerParams p;
  p.kind = LayerKind::kActivation;
  p.activation = kind;
  p.lipschitz_constant = 1.0;
  return p;
}

LayerGrads ZeroGrads(const LayerParams& params) {
  LayerGrads g;
  switch (params.kind) {
    case LayerKind::kDense:
    case LayerKind::kCirculant:
      g.weight = Tensor(params.weight.shape());
      if (params.bias) g.bias = Tensor(params.bias->shape());
      break;
    case LayerKind::kBatchNorm:
      g.bn_gamma = Tensor(params.bn_gamma.shape());
      g.bn_beta = Tensor(params.bn_beta.shape());
      break;
    case LayerKind::kActivation:
      break;
  }
  return g;
}

double ApplyActivation(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::kRelu:
      return z > 0.0 ? z : 0.0;
    case ActivationKind::kIdentity:
      return z;
    case ActivationKind::kTanh:
      return std::tanh(z);
  }
  return z;
}

double ActivationDerivative(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case ActivationKind::kIdentity:
      return 1.0;
    case ActivationKind::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

absl::StatusOr<Tensor> LayerForward(const Tensor& x, Mode mode,
                                    LayerParams* params, LayerCache* cache) {
  if (x.rank() != 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("layer input must be a batch matrix, got ",
                     x.ShapeString()));
  }
  const std::size_t in = params->InputDim();
  if (in != 0 && x.cols() != in) return ShapeError("layer", x, in);
  if (cache != nullptr) {
    cache->mode = mode;
    cache->input = x;
  }
  switch (params->kind) {
    case LayerKind::kDense:
      return DenseForward(*params, x);
    case LayerKind::kCirculant:
      return CirculantForward(*params, x);
    case LayerKind::kBatchNorm:
      return BatchNormForward(x, mode, params, cache);
    case LayerKind::kActivation: {
      Tensor y = x;
      for (double& v : y.values()) v = ApplyActivation(params->activation, v);
      return y;
    }
  }
  return absl::InternalError("unhandled layer kind");
}

Tensor LayerBackward(const LayerParams& params, const LayerCache& cache,
                     const Tensor& grad_out, LayerGrads* grads) {
  const Tensor& x = cache.input;
  const std::size_t b = x.rows();
  switch (params.kind) {
    case LayerKind::kDense: {
      const std::size_t out = params.weight.rows();
      const std::size_t in = params.weight.cols();
      Tensor gx = Tensor::Matrix(b, in);
      auto& gw = grads->weight.storage();
      for (std::size_t n = 0; n < b; ++n) {
        const auto xr = x.row(n);
        const auto gr = grad_out.row(n);
        auto gxr = gx.row(n);
        for (std::size_t o = 0; o < out; ++o) {
          const double g = gr[o];
          const double* w = &params.weight.storage()[o * in];
          double* gwr = &gw[o * in];
          for (std::size_t i = 0; i < in; ++i) {
            gwr[i] += g * xr[i];
            gxr[i] += g * w[i];
          }
          if (params.bias) grads->bias[o] += g;
        }
      }
      return gx;
    }
    case LayerKind::kCirculant: {
      const std::size_t d = params.weight.size();
      const auto& a = params.weight.storage();
      Tensor gx = Tensor::Matrix(b, d);
      std::vector<double> local(d);
      for (std::size_t n = 0; n < b; ++n) {
        const auto xr = x.row(n);
        const auto gr = grad_out.row(n);
        auto gxr = gx.row(n);
        std::fill(local.begin(), local.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) {
          const double g = gr[i];
          for (std::size_t k = 0; k < d; ++k) {
            const std::size_t j = (i + k) % d;
            local[k] += g * xr[j];
            gxr[j] += g * a[k];
          }
        }
        for (std::size_t k = 0; k < d; ++k) grads->weight[k] += local[k];
        if (params.bias) {
          for (std::size_t i = 0; i < d; ++i) grads->bias[i] += gr[i];
        }
      }
      return gx;
    }
    case LayerKind::kBatchNorm: {
      const std::size_t d = x.cols();
      Tensor gx = Tensor::Matrix(b, d);
      for (std::size_t n = 0; n < b; ++n) {
        for (std::size_t j = 0; j < d; ++j) {
          grads->bn_beta[j] += grad_out.at(n, j);
          grads->bn_gamma[j] += grad_out.at(n, j) * cache.normalized.at(n, j);
        }
      }
      if (cache.mode == Mode::kEval) {
        for (std::size_t n = 0; n < b; ++n) {
          for (std::size_t j = 0; j < d; ++j) {
            gx.at(n, j) =
                grad_out.at(n, j) * params.bn_gamma[j] * cache.inv_std[j];
          }
        }
        return gx;
      }
      const double bd = static_cast<double>(b);
      for (std::size_t j = 0; j < d; ++j) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t n = 0; n < b; ++n) {
          const double gh = grad_out.at(n, j) * params.bn_gamma[j];
          sum_g += gh;
          sum_gx += gh * cache.normalized.at(n, j);
        }
        for (std::size_t n = 0; n < b; ++n) {
          const double gh = grad_out.at(n, j) * params.bn_gamma[j];
          // A clamped variance is a constant, so only the mean couples rows.
          const double coupled =
              cache.clamped[j]
                  ? gh - sum_g / bd
                  : gh - sum_g / bd - cache.normalized.at(n, j) * sum_gx / bd;
          gx.at(n, j) = cache.inv_std[j] * coupled;
        }
      }
      return gx;
    }
    case LayerKind::kActivation: {
      Tensor gx = grad_out;
      for (std::size_t i = 0; i < gx.size(); ++i) {
        gx[i] *= ActivationDerivative(params.activation, x[i]);
      }
      return gx;
    }
  }
  return grad_out;
}

}  // namespace rp::nn
