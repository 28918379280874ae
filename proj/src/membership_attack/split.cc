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

#include "membership_attack/split.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace rp::attack {
namespace {

DatasetSplit Deal(const std::vector<std::size_t>& order) {
  const std::size_t quarter = order.size() / 4;
  DatasetSplit split;
  std::vector<std::size_t>* parts[4] = {&split.shadow_train, &split.shadow_out,
                                        &split.target_train, &split.target_out};
  for (std::size_t i = 0; i < 4 * quarter; ++i) {
    parts[i % 4]->push_back(order[i]);
  }
  return split;
}

absl::Status CheckSize(std::size_t n) {
  if (n < 4) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 4 pool points to split, got ", n));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<DatasetSplit> SplitDataset(std::size_t n, nn::Rng& rng) {
  if (auto s = CheckSize(n); !s.ok()) return s;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));
  return Deal(order);
}

absl::StatusOr<DatasetSplit> SplitDatasetStratified(std::span<const int> labels,
                                                    nn::Rng& rng) {
  if (auto s = CheckSize(labels.size()); !s.ok()) return s;
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(i);
  }
  // Concatenating shuffled classes and dealing cyclically balances classes
  // across the four parts; only the tail of the last class can be dropped.
  std::vector<std::size_t> order;
  order.reserve(labels.size());
  for (auto& [label, members] : by_class) {
    rng.Shuffle(std::span<std::size_t>(members));
    order.insert(order.end(), members.begin(), members.end());
  }
  return Deal(order);
}

}  // namespace rp::attack
