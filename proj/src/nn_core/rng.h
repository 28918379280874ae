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

#ifndef RP_NN_CORE_RNG_H_
#define RP_NN_CORE_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace rp::nn {

// Seeded random stream. Copying an Rng snapshots its full state (including
// the cached second normal variate), so a copy replays the same draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  double Normal() { return normal_(engine_); }
  double Uniform() { return uniform_(engine_); }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform on {0, ..., n-1}; n must be positive.
  std::size_t Index(std::size_t n);
  std::uint64_t Bits() { return engine_(); }

  void FillNormal(std::span<double> out, double scale = 1.0);
  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Index(i)]);
    }
  }

  // Independent child stream identified by `stream`; depends only on this
  // stream's seed, never on how many draws were taken from it.
  Rng Fork(std::uint64_t stream) const { return Rng(DeriveSeed(seed_, stream)); }

  static std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace rp::nn

#endif  // RP_NN_CORE_RNG_H_
