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

#include "nn_core/grad_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rp::nn {

GradCheckResult FiniteDiffCheck(const std::function<double()>& loss,
                                std::span<Tensor* const> params,
                                std::span<const Tensor> analytic,
                                int probe_count, Rng& rng, double step,
                                double floor) {
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const Tensor* p : params) {
    offsets.push_back(total);
    total += p->size();
  }
  GradCheckResult result;
  if (total == 0) return result;
  for (int probe = 0; probe < probe_count; ++probe) {
    const std::size_t flat = rng.Index(total);
    const std::size_t which = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), flat) -
        offsets.begin() - 1);
    const std::size_t idx = flat - offsets[which];
    double& coord = (*params[which])[idx];
    const double saved = coord;
    coord = saved + step;
    const double up = loss();
    coord = saved - step;
    const double down = loss();
    coord = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic[which][idx];
    const double denom = std::max({std::abs(a), std::abs(numeric), floor});
    result.max_relative_error =
        std::max(result.max_relative_error, std::abs(a - numeric) / denom);
    ++result.probes;
  }
  return result;
}

}  // namespace rp::nn
