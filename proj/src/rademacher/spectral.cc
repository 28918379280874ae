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

#include "rademacher/spectral.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"

namespace rp::rademacher {

ComplexMatrix ComplexMatrix::Zero(std::size_t rows, std::size_t cols) {
  return ComplexMatrix{rows, cols, std::vector<Complex>(rows * cols)};
}

absl::StatusOr<CirculantSpectrum> DftEigenDecompose(
    std::span<const Complex> first_row) {
  const std::size_t d = first_row.size();
  if (d == 0) return absl::InvalidArgumentError("empty first row");
  CirculantSpectrum out;
  out.eigenvalues.assign(d, Complex(0.0, 0.0));
  out.psi = ComplexMatrix::Zero(d, d);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      // Reduce the exponent first so large d keeps full phase accuracy.
      const double angle = 2.0 * std::numbers::pi *
                           static_cast<double>((j * k) % d) /
                           static_cast<double>(d);
      const Complex m = std::polar(1.0, angle);
      out.eigenvalues[k] += first_row[j] * m;
      out.psi.at(j, k) = m * inv_sqrt_d;
    }
  }
  return out;
}

absl::StatusOr<CirculantSpectrum> DftEigenDecompose(
    std::span<const double> first_row) {
  std::vector<Complex> row(first_row.begin(), first_row.end());
  return DftEigenDecompose(std::span<const Complex>(row));
}

ComplexMatrix ComplexCirculant(std::span<const Complex> first_row) {
  const std::size_t d = first_row.size();
  ComplexMatrix c = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) c.at(i, j) = first_row[(j + d - i) % d];
  }
  return c;
}

ComplexMatrix Reconstruct(const CirculantSpectrum& s) {
  const std::size_t d = s.eigenvalues.size();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Complex acc(0.0, 0.0);
      for (std::size_t k = 0; k < d; ++k) {
        acc += s.psi.at(i, k) * s.eigenvalues[k] * std::conj(s.psi.at(j, k));
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

double FrobeniusDistance(const ComplexMatrix& a, const ComplexMatrix& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    sq += std::norm(a.values[i] - b.values[i]);
  }
  return std::sqrt(sq);
}

std::vector<Complex> ToSpectral(const CirculantSpectrum& s,
                                std::span<const Complex> v) {
  const std::size_t d = s.eigenvalues.size();
  std::vector<Complex> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      out[k] += std::conj(s.psi.at(j, k)) * v[j];
    }
  }
  return out;
}

std::vector<Complex> FromSpectral(const CirculantSpectrum& s,
                                  std::span<const Complex> v) {
  const std::size_t d = s.eigenvalues.size();
  std::vector<Complex> out(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) out[j] += s.psi.at(j, k) * v[k];
  }
  return out;
}

}  // namespace rp::rademacher
