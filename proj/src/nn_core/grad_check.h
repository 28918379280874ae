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

#ifndef RP_NN_CORE_GRAD_CHECK_H_
#define RP_NN_CORE_GRAD_CHECK_H_

#include <functional>
#include <span>

#include "nn_core/rng.h"
#include "nn_core/tensor.h"

namespace rp::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  int probes = 0;
};

// Compares `analytic` against central differences of `loss` at `probe_count`
// coordinates drawn uniformly over all parameters. `loss` must be
// deterministic (freeze any noise before calling). Parameters are restored
// after each probe. The relative error at a coordinate is
// |a - n| / max(|a|, |n|, floor).
GradCheckResult FiniteDiffCheck(const std::function<double()>& loss,
                                std::span<Tensor* const> params,
                                std::span<const Tensor> analytic,
                                int probe_count, Rng& rng,
                                double step = 1e-5, double floor = 1e-6);

}  // namespace rp::nn

#endif  // RP_NN_CORE_GRAD_CHECK_H_
