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

#ifndef RP_NN_CORE_CIRCULANT_H_
#define RP_NN_CORE_CIRCULANT_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace rp::nn {

// Circulant matrices are stored by their first row a = (a_0, ..., a_{d-1});
// row i is the first row cyclically shifted right by i, so
// C[i][j] = a[(j - i) mod d].

// y = C x by direct O(d^2) summation.
absl::StatusOr<std::vector<double>> CirculantMatVec(
    std::span<const double> first_row, std::span<const double> x);

// y = C x through the discrete Fourier basis that diagonalizes C.
absl::StatusOr<std::vector<double>> CirculantMatVecSpectral(
    std::span<const double> first_row, std::span<const double> x);

// y = C^T x.
absl::StatusOr<std::vector<double>> CirculantTransposeMatVec(
    std::span<const double> first_row, std::span<const double> x);

// Explicit d x d matrix, row-major.
std::vector<double> CirculantMatrix(std::span<const double> first_row);

}  // namespace rp::nn

#endif  // RP_NN_CORE_CIRCULANT_H_
