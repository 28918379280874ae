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

#ifndef RP_RADEMACHER_SPECTRAL_H_
#define RP_RADEMACHER_SPECTRAL_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace rp::rademacher {

using Complex = std::complex<double>;

// Dense complex matrix, row-major.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> values;

  static ComplexMatrix Zero(std::size_t rows, std::size_t cols);
  Complex& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  const Complex& at(std::size_t i, std::size_t j) const {
    return values[i * cols + j];
  }
};

// C = Psi diag(lambda) Psi^H for the circulant C[i][j] = a[(j - i) mod d].
// lambda_k = sum_j a_j m_k^j with m_k = exp(2 pi i k / d) and column k of the
// unitary Psi is (1, m_k, ..., m_k^{d-1}) / sqrt(d).
struct CirculantSpectrum {
  std::vector<Complex> eigenvalues;
  ComplexMatrix psi;
};

absl::StatusOr<CirculantSpectrum> DftEigenDecompose(
    std::span<const Complex> first_row);
absl::StatusOr<CirculantSpectrum> DftEigenDecompose(
    std::span<const double> first_row);

// Explicit circulant matrix of a complex first row.
ComplexMatrix ComplexCirculant(std::span<const Complex> first_row);

// Psi diag(lambda) Psi^H.
ComplexMatrix Reconstruct(const CirculantSpectrum& spectrum);

// Frobenius norm of a - b; shapes must agree.
double FrobeniusDistance(const ComplexMatrix& a, const ComplexMatrix& b);

// Psi^H v and Psi v.
std::vector<Complex> ToSpectral(const CirculantSpectrum& s,
                                std::span<const Complex> v);
std::vector<Complex> FromSpectral(const CirculantSpectrum& s,
                                  std::span<const Complex> v);

}  // namespace rp::rademacher

#endif  // RP_RADEMACHER_SPECTRAL_H_
