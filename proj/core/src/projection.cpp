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

#include "amm/projection.hpp"

#include <cmath>
#include <string>

#include "amm/errors.hpp"

namespace amm {
namespace {

void add_bias_rows(Matrix& m, const Matrix& bias) {
  auto b = bias.row(0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
  }
}

Matrix column_sums(const Matrix& m) {
  Matrix out(1, m.cols());
  auto dst = out.row(0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) dst[c] += row[c];
  }
  return out;
}

// Gradient of GLU with respect to its pre-activation z (B x 2n), given the
// upstream gradient g (B x n).
Matrix glu_backward(const Matrix& z, const Matrix& g) {
  const std::size_t n = g.cols();
  Matrix dz(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double a = z(r, c);
      const double gate = sigmoid(z(r, n + c));
      dz(r, c) = g(r, c) * gate;
      dz(r, n + c) = g(r, c) * a * gate * (1.0 - gate);
    }
  }
  return dz;
}

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
}

}  // namespace

GluMlpHead GluMlpHead::zeros(const HeadDims& dims) {
  return {Matrix(dims.d_in, 2 * dims.hidden), Matrix(1, 2 * dims.hidden),
          Matrix(dims.hidden, 2 * dims.d_out), Matrix(1, 2 * dims.d_out)};
}

HeadDims GluMlpHead::dims() const noexcept {
  return {layer1_weight.rows(), layer1_weight.cols() / 2, layer2_weight.cols() / 2};
}

void GluMlpHead::validate() const {
  const bool ok = layer1_weight.cols() % 2 == 0 && layer2_weight.cols() % 2 == 0 &&
                  layer1_bias.rows() == 1 && layer1_bias.cols() == layer1_weight.cols() &&
                  layer2_weight.rows() * 2 == layer1_weight.cols() && layer2_bias.rows() == 1 &&
                  layer2_bias.cols() == layer2_weight.cols();
  if (!ok) {
    throw ShapeError("projection head has inconsistent shapes: W1 " + layer1_weight.shape_string() +
                     ", b1 " + layer1_bias.shape_string() + ", W2 " +
                     layer2_weight.shape_string() + ", b2 " + layer2_bias.shape_string());
  }
}

std::array<Matrix*, 4> GluMlpHead::parameters() noexcept {
  return {&layer1_weight, &layer1_bias, &layer2_weight, &layer2_bias};
}

std::array<const Matrix*, 4> GluMlpHead::parameters() const noexcept {
  return {&layer1_weight, &layer1_bias, &layer2_weight, &layer2_bias};
}

std::vector<double> glu(std::span<const double> z) {
  if (z.size() % 2 != 0) {
    throw ShapeError("glu: input length " + std::to_string(z.size()) + " is odd");
  }
  const std::size_t n = z.size() / 2;
  std::vector<double> out(n);
  for (std::size_t c = 0; c < n; ++c) out[c] = z[c] * sigmoid(z[n + c]);
  return out;
}

Matrix glu_rows(const Matrix& z) {
  if (z.cols() % 2 != 0) throw ShapeError("glu: width " + std::to_string(z.cols()) + " is odd");
  const std::size_t n = z.cols() / 2;
  Matrix out(z.rows(), n);
  for (std::size_t r = 0; r < z.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = z(r, c) * sigmoid(z(r, n + c));
  return out;
}

HeadForward head_forward(const GluMlpHead& head, const EmbeddingBatch& x) {
  head.validate();
  if (x.cols() != head.layer1_weight.rows()) {
    throw ShapeError("head_forward: input " + x.shape_string() + " does not match W1 " +
                     head.layer1_weight.shape_string());
  }
  HeadForward fwd;
  fwd.cache.input = x;
  fwd.cache.pre1 = matmul(x, head.layer1_weight);
  add_bias_rows(fwd.cache.pre1, head.layer1_bias);
  fwd.cache.hidden = glu_rows(fwd.cache.pre1);
  fwd.cache.pre2 = matmul(fwd.cache.hidden, head.layer2_weight);
  add_bias_rows(fwd.cache.pre2, head.layer2_bias);
  fwd.out = glu_rows(fwd.cache.pre2);
  return fwd;
}

Matrix head_project(const GluMlpHead& head, const EmbeddingBatch& x) {
  return std::move(head_forward(head, x).out);
}

HeadBackward head_backward(const GluMlpHead& head, const HeadCache& cache, const Matrix& grad_out) {
  head.validate();
  const HeadDims dims = head.dims();
  if (grad_out.rows() != cache.input.rows() || grad_out.cols() != dims.d_out ||
      cache.pre2.rows() != grad_out.rows() || cache.pre2.cols() != 2 * dims.d_out ||
      cache.hidden.cols() != dims.hidden || cache.input.cols() != dims.d_in) {
    throw ShapeError("head_backward: upstream gradient " + grad_out.shape_string() +
                     " does not match cached forward pass on input " +
                     cache.input.shape_string());
  }
  HeadBackward bwd;
  const Matrix dpre2 = glu_backward(cache.pre2, grad_out);
  bwd.grad_params.layer2_weight = transposed_matmul(cache.hidden, dpre2);
  bwd.grad_params.layer2_bias = column_sums(dpre2);
  const Matrix dhidden = matmul_transposed(dpre2, head.layer2_weight);
  const Matrix dpre1 = glu_backward(cache.pre1, dhidden);
  bwd.grad_params.layer1_weight = transposed_matmul(cache.input, dpre1);
  bwd.grad_params.layer1_bias = column_sums(dpre1);
  bwd.grad_x = matmul_transposed(dpre1, head.layer1_weight);
  return bwd;
}

GluMlpHead head_init(const HeadDims& dims, Rng& rng) {
  if (dims.d_in == 0 || dims.hidden == 0 || dims.d_out == 0) {
    throw ArgumentError("head_init: dims must all be >= 1 (d_in " + std::to_string(dims.d_in) +
                        ", hidden " + std::to_string(dims.hidden) + ", d_out " +
                        std::to_string(dims.d_out) + ")");
  }
  GluMlpHead head = GluMlpHead::zeros(dims);
  fill_uniform(head.layer1_weight,
               std::sqrt(6.0 / static_cast<double>(dims.d_in + 2 * dims.hidden)), rng);
  fill_uniform(head.layer2_weight,
               std::sqrt(6.0 / static_cast<double>(dims.hidden + 2 * dims.d_out)), rng);
  return head;
}

}  // namespace amm
