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

#include "amm/numeric.hpp"

namespace amm {

/// B x B matrix of pairwise scores between two aligned batches. Pair i sits
/// at row i and column i, so positives are the diagonal.
struct SimilarityMatrix {
  Matrix s;

  std::size_t batch() const noexcept { return s.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return s(i, j); }
};

struct SimilarityGradients {
  Matrix grad_x;
  Matrix grad_y;
};

/// s[i][j] = <x_i, y_j>. Rows of x and y must pair up one to one.
SimilarityMatrix similarity_forward(const EmbeddingBatch& x, const EmbeddingBatch& y);

/// Chain rule for S = X Y^T: grad_x = G Y, grad_y = G^T X.
SimilarityGradients similarity_backward(const Matrix& grad_s, const EmbeddingBatch& x,
                                        const EmbeddingBatch& y);

/// Row-wise L2 normalization. Not applied by similarity_forward; exposed for
/// cosine-similarity ablations. Zero rows are left as zero.
Matrix l2_normalize_rows(const Matrix& m);

}  // namespace amm
