// Copyright 2026 The amm-align Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "amm/numeric.hpp"
#include "amm/projection.hpp"

namespace amm {

/// Adam with bias correction. No weight decay, no clipping.
struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t t = 0;
  std::vector<Matrix> m;  // first moments, lazily shaped on the first step
  std::vector<Matrix> v;  // second moments

  explicit AdamState(double learning_rate = 0.001) : lr(learning_rate) {}
};

struct ParamSlot {
  std::string_view name;
  Matrix& value;
  const Matrix& grad;
};

/// One update over all slots. Gradients are checked before anything is
/// written, so a ShapeError or NumericError leaves params and state untouched.
void adam_step(AdamState& state, std::span<const ParamSlot> slots);

void adam_step(AdamState& state, GluMlpHead& head, const HeadGradients& grads);

}  // namespace amm
