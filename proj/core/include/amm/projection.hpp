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

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "amm/numeric.hpp"
#include "amm/rng.hpp"

namespace amm {

struct HeadDims {
  std::size_t d_in = 0;
  std::size_t hidden = 0;
  std::size_t d_out = 4096;
};

/// Projection head made of two [linear -> GLU] blocks:
///   out = GLU(GLU(x W1 + b1) W2 + b2)
/// W1 is d_in x 2h and W2 is h x 2*d_out, so each GLU halves the width back
/// to h and d_out. Biases are stored as 1 x n matrices.
struct GluMlpHead {
  Matrix layer1_weight;
  Matrix layer1_bias;
  Matrix layer2_weight;
  Matrix layer2_bias;

  /// Zero-valued head with the shapes implied by `dims`.
  static GluMlpHead zeros(const HeadDims& dims);

  HeadDims dims() const noexcept;
  /// Throws ShapeError if the four tensors disagree with each other.
  void validate() const;

  static constexpr std::array<std::string_view, 4> kParamNames = {
      "layer1_weight", "layer1_bias", "layer2_weight", "layer2_bias"};
  std::array<Matrix*, 4> parameters() noexcept;
  std::array<const Matrix*, 4> parameters() const noexcept;

  bool operator==(const GluMlpHead&) const = default;
};

/// Gradients share the head's layout.
using HeadGradients = GluMlpHead;

/// Intermediate activations kept by head_forward for the backward pass.
struct HeadCache {
  Matrix input;
  Matrix pre1;    // B x 2h
  Matrix hidden;  // B x h
  Matrix pre2;    // B x 2 d_out
};

struct HeadForward {
  Matrix out;
  HeadCache cache;
};

struct HeadBackward {
  HeadGradients grad_params;
  Matrix grad_x;
};

/// Row-wise GLU: first half times sigmoid of the second half.
std::vector<double> glu(std::span<const double> z);
Matrix glu_rows(const Matrix& z);

HeadForward head_forward(const GluMlpHead& head, const EmbeddingBatch& x);
/// Forward pass without keeping activations.
Matrix head_project(const GluMlpHead& head, const EmbeddingBatch& x);
HeadBackward head_backward(const GluMlpHead& head, const HeadCache& cache, const Matrix& grad_out);

/// Xavier-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
GluMlpHead head_init(const HeadDims& dims, Rng& rng);

}  // namespace amm
