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
#include <string_view>
#include <vector>

#include "amm/numeric.hpp"
#include "amm/similarity.hpp"

namespace amm {

enum class LossKind { nce, shn, mms, amm };

std::string_view to_string(LossKind kind) noexcept;
/// Accepts "nce", "shn", "mms", "amm"; throws ArgumentError otherwise.
LossKind parse_loss_kind(std::string_view name);

/// Scalar loss and its exact gradient with respect to the similarity matrix.
struct LossOutput {
  double value = 0.0;
  Matrix grad_s;
};

/// Growing margin for the masked margin softmax: initial * growth^floor(step / period_steps).
struct MmsSchedule {
  double initial = 0.001;
  double growth = 1.002;
  std::uint64_t period_steps = 1000;

  void validate() const;
  bool operator==(const MmsSchedule&) const = default;
};

/// Adaptive mean margin. `alpha` in [0, 1] scales the gap between the
/// positive similarity and the mean negative similarity of each anchor.
struct AmmConfig {
  double alpha = 0.5;

  void validate() const;
};

// Every directional loss below scores anchors along the rows of S (x_i
// against all y_j) and averages over the B rows. B >= 2 is required and a
// DegenerateBatchError is thrown otherwise.

/// -(1/B) sum_i log(e^{S_ii} / sum_{j!=i} e^{S_ij}). With include_positive the
/// denominator also carries e^{S_ii} (standard InfoNCE).
LossOutput nce_directional(const SimilarityMatrix& s, bool include_positive = false);

/// Masked margin softmax with a fixed margin m subtracted from the positive logit.
LossOutput mms_directional(const SimilarityMatrix& s, double margin);

double mms_margin_at(const MmsSchedule& schedule, std::uint64_t step);

/// Column of the negative used for row `row`: the most similar negative that is
/// still strictly below the positive, else the least similar negative. Ties go
/// to the smaller column index.
std::size_t shn_mine_negative(const SimilarityMatrix& s, std::size_t row);

/// Triplet hinge max(S_ij* - S_ii + m, 0) on one mined negative per row.
/// The gradient is the subgradient that is zero on inactive hinges.
LossOutput shn_directional(const SimilarityMatrix& s, double margin = 1.0);

/// M_i = alpha * (S_ii - mean_{j!=i} S_ij).
std::vector<double> amm_margins(const SimilarityMatrix& s, const AmmConfig& cfg);

/// Masked margin softmax with the per-row adaptive margin. The margin is a
/// function of S and is differentiated through, so at alpha = 1 the positive
/// similarity drops out of the loss entirely.
LossOutput amm_directional(const SimilarityMatrix& s, const AmmConfig& cfg);

struct LossParams {
  double mms_margin = 0.001;
  double shn_margin = 1.0;
  AmmConfig amm;
  bool include_positive_in_nce = false;
};

LossOutput directional_loss(LossKind kind, const SimilarityMatrix& s, const LossParams& params);

/// L = L_xy(S) + L_yx(S^T). The second direction's gradient is transposed back
/// before summing, so grad_s is d(total)/dS.
LossOutput bidirectional_loss(LossKind kind, const SimilarityMatrix& s, const LossParams& params);

}  // namespace amm
