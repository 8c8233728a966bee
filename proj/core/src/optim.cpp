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

#include "amm/optim.hpp"

#include <cmath>
#include <string>

#include "amm/errors.hpp"

namespace amm {

void adam_step(AdamState& state, std::span<const ParamSlot> slots) {
  const bool fresh = state.m.empty();
  if (!fresh && (state.m.size() != slots.size() || state.v.size() != slots.size())) {
    throw ShapeError("adam_step: optimizer tracks " + std::to_string(state.m.size()) +
                     " tensors, got " + std::to_string(slots.size()));
  }
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& slot = slots[k];
    if (slot.value.rows() != slot.grad.rows() || slot.value.cols() != slot.grad.cols()) {
      throw ShapeError("adam_step: gradient " + slot.grad.shape_string() + " for '" +
                       std::string(slot.name) + "' does not match parameter " +
                       slot.value.shape_string());
    }
    if (!fresh && (state.m[k].rows() != slot.value.rows() || state.m[k].cols() != slot.value.cols())) {
      throw ShapeError("adam_step: moment buffer for '" + std::string(slot.name) + "' is " +
                       state.m[k].shape_string() + ", parameter is " + slot.value.shape_string());
    }
    if (!all_finite(slot.grad.values())) {
      throw NumericError("adam_step: non-finite gradient for '" + std::string(slot.name) + "'");
    }
  }
  if (fresh) {
    for (const auto& slot : slots) {
      state.m.emplace_back(slot.value.rows(), slot.value.cols());
      state.v.emplace_back(slot.value.rows(), slot.value.cols());
    }
  }

  ++state.t;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    auto p = slots[k].value.values();
    auto g = slots[k].grad.values();
    auto m = state.m[k].values();
    auto v = state.v[k].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

void adam_step(AdamState& state, GluMlpHead& head, const HeadGradients& grads) {
  auto params = head.parameters();
  auto g = grads.parameters();
  const ParamSlot slots[] = {
      {GluMlpHead::kParamNames[0], *params[0], *g[0]},
      {GluMlpHead::kParamNames[1], *params[1], *g[1]},
      {GluMlpHead::kParamNames[2], *params[2], *g[2]},
      {GluMlpHead::kParamNames[3], *params[3], *g[3]},
  };
  adam_step(state, slots);
}

}  // namespace amm
