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

#ifndef RP_NN_CORE_FORMAT_H_
#define RP_NN_CORE_FORMAT_H_

#include <string>

namespace rp::nn {

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace rp::nn

#endif  // RP_NN_CORE_FORMAT_H_
