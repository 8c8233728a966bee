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

#include "amm/similarity.hpp"

#include <cmath>

#include "amm/errors.hpp"

namespace amm {

SimilarityMatrix similarity_forward(const EmbeddingBatch& x, const EmbeddingBatch& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError("similarity_forward: batches " + x.shape_string() + " and " +
                     y.shape_string() + " do not pair up");
  }
  return {matmul_transposed(x, y)};
}

SimilarityGradients similarity_backward(const Matrix& grad_s, const EmbeddingBatch& x,
                                        const EmbeddingBatch& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || grad_s.rows() != x.rows() ||
      grad_s.cols() != y.rows()) {
    throw ShapeError("similarity_backward: grad " + grad_s.shape_string() + " inconsistent with " +
                     x.shape_string() + " and " + y.shape_string());
  }
  return {matmul(grad_s, y), transposed_matmul(grad_s, x)};
}

Matrix l2_normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    if (sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : row) v *= inv;
  }
  return out;
}

}  // namespace amm
