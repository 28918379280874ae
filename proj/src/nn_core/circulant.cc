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

#include "nn_core/circulant.h"

#include <complex>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace rp::nn {
namespace {

absl::Status CheckLengths(std::span<const double> first_row,
                          std::span<const double> x) {
  if (first_row.empty()) {
    return absl::InvalidArgumentError("circulant dimension must be >= 1");
  }
  if (first_row.size() != x.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("circulant dimension mismatch: first row has ",
                     first_row.size(), " entries, vector has ", x.size()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<double>> CirculantMatVec(
    std::span<const double> first_row, std::span<const double> x) {
  if (auto s = CheckLengths(first_row, x); !s.ok()) return s;
  const std::size_t d = x.size();
  std::vector<double> y(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      acc += first_row[(j + d - i) % d] * x[j];
    }
    y[i] = acc;
  }
  return y;
}

absl::StatusOr<std::vector<double>> CirculantTransposeMatVec(
    std::span<const double> first_row, std::span<const double> x) {
  if (auto s = CheckLengths(first_row, x); !s.ok()) return s;
  const std::size_t d = x.size();
  std::vector<double> y(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      acc += first_row[(j + d - i) % d] * x[i];
    }
    y[j] = acc;
  }
  return y;
}

absl::StatusOr<std::vector<double>> CirculantMatVecSpectral(
    std::span<const double> first_row, std::span<const double> x) {
  if (auto s = CheckLengths(first_row, x); !s.ok()) return s;
  using Complex = std::complex<double>;
  const std::size_t d = x.size();
  const double step = 2.0 * std::numbers::pi / static_cast<double>(d);
  auto root = [&](std::size_t k, std::size_t j) {
    return std::polar(1.0, step * static_cast<double>((k * j) % d));
  };
  // Eigenvector k has entries m_k^j / sqrt(d) with m_k = exp(2 pi i k / d);
  // its eigenvalue is sum_j a_j m_k^j.
  std::vector<double> y(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    Complex lambda = 0.0;
    Complex coeff = 0.0;  // <psi_k, x> * sqrt(d)
    for (std::size_t j = 0; j < d; ++j) {
      lambda += first_row[j] * root(k, j);
      coeff += std::conj(root(k, j)) * x[j];
    }
    const Complex scaled = lambda * coeff / static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j) {
      y[j] += (scaled * root(k, j)).real();
    }
  }
  return y;
}

std::vector<double> CirculantMatrix(std::span<const double> first_row) {
  const std::size_t d = first_row.size();
  std::vector<double> m(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      m[i * d + j] = first_row[(j + d - i) % d];
    }
  }
  return m;
}

}  // namespace rp::nn
