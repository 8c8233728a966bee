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

#include "amm/losses.hpp"

#include <cmath>
#include <string>

#include "amm/errors.hpp"

namespace amm {
namespace {

void require_contrastive_batch(const SimilarityMatrix& s, const char* op) {
  if (s.s.rows() != s.s.cols()) {
    throw ShapeError(std::string(op) + ": similarity matrix must be square, got " +
                     s.s.shape_string());
  }
  if (s.batch() < 2) {
    throw DegenerateBatchError(std::string(op) + ": batch of " + std::to_string(s.batch()) +
                               " has no negatives");
  }
  if (!all_finite(s.s.values())) {
    throw NumericError(std::string(op) + ": similarity matrix has non-finite entries");
  }
}

// Row i of a margined softmax whose positive logit is `positive_logit`:
//   loss_i = logsumexp(positive_logit, S_ij for j != i) - positive_logit.
// Writes d(loss_i)/dS_ij * scale for the negatives into grad and returns
// d(loss_i)/d(positive_logit) = p_pos - 1.
double margined_row(const Matrix& s, std::size_t i, double positive_logit, double scale,
                    Matrix& grad, double& row_loss) {
  const std::size_t b = s.cols();
  double hi = positive_logit;
  for (std::size_t j = 0; j < b; ++j)
    if (j != i && s(i, j) > hi) hi = s(i, j);

  double denom = std::exp(positive_logit - hi);
  for (std::size_t j = 0; j < b; ++j)
    if (j != i) denom += std::exp(s(i, j) - hi);

  const double log_denom = hi + std::log(denom);
  row_loss = log_denom - positive_logit;
  for (std::size_t j = 0; j < b; ++j)
    if (j != i) grad(i, j) = scale * std::exp(s(i, j) - log_denom);
  return std::exp(positive_logit - log_denom) - 1.0;
}

double mean_negative(const Matrix& s, std::size_t i) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.cols(); ++j)
    if (j != i) acc += s(i, j);
  return acc / static_cast<double>(s.cols() - 1);
}

}  // namespace

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::nce: return "nce";
    case LossKind::shn: return "shn";
    case LossKind::mms: return "mms";
    case LossKind::amm: return "amm";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "nce") return LossKind::nce;
  if (name == "shn") return LossKind::shn;
  if (name == "mms") return LossKind::mms;
  if (name == "amm") return LossKind::amm;
  throw ArgumentError("unknown loss kind '" + std::string(name) + "' (expected nce|shn|mms|amm)");
}

void MmsSchedule::validate() const {
  if (!(initial > 0.0) || !std::isfinite(initial))
    throw ArgumentError("mms schedule: initial margin must be positive");
  if (!(growth >= 1.0) || !std::isfinite(growth))
    throw ArgumentError("mms schedule: growth must be >= 1");
  if (period_steps < 1) throw ArgumentError("mms schedule: period_steps must be >= 1");
}

void AmmConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ArgumentError("amm: alpha must lie in [0, 1], got " + std::to_string(alpha));
}

LossOutput nce_directional(const SimilarityMatrix& s, bool include_positive) {
  require_contrastive_batch(s, "nce");
  const std::size_t b = s.batch();
  const double scale = 1.0 / static_cast<double>(b);
  LossOutput out{0.0, Matrix(b, b)};

  if (include_positive) {
    for (std::size_t i = 0; i < b; ++i) {
      double row_loss = 0.0;
      const double dpos = margined_row(s.s, i, s(i, i), scale, out.grad_s, row_loss);
      out.grad_s(i, i) = scale * dpos;
      out.value += row_loss;
    }
    out.value *= scale;
    return out;
  }

  std::vector<double> negatives(b - 1);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0, k = 0; j < b; ++j)
      if (j != i) negatives[k++] = s(i, j);
    const double lse = log_sum_exp(negatives);
    out.value += lse - s(i, i);
    for (std::size_t j = 0; j < b; ++j)
      if (j != i) out.grad_s(i, j) = scale * std::exp(s(i, j) - lse);
    out.grad_s(i, i) = -scale;
  }
  out.value *= scale;
  return out;
}

LossOutput mms_directional(const SimilarityMatrix& s, double margin) {
  require_contrastive_batch(s, "mms");
  if (!std::isfinite(margin)) throw ArgumentError("mms: margin must be finite");
  const std::size_t b = s.batch();
  const double scale = 1.0 / static_cast<double>(b);
  LossOutput out{0.0, Matrix(b, b)};
  for (std::size_t i = 0; i < b; ++i) {
    double row_loss = 0.0;
    const double dpos = margined_row(s.s, i, s(i, i) - margin, scale, out.grad_s, row_loss);
    out.grad_s(i, i) = scale * dpos;
    out.value += row_loss;
  }
  out.value *= scale;
  return out;
}

double mms_margin_at(const MmsSchedule& schedule, std::uint64_t step) {
  const auto periods = static_cast<double>(step / schedule.period_steps);
  return schedule.initial * std::pow(schedule.growth, periods);
}

std::size_t shn_mine_negative(const SimilarityMatrix& s, std::size_t row) {
  const std::size_t b = s.batch();
  const double positive = s(row, row);
  std::size_t semi_hard = b;
  std::size_t easiest = b;
  for (std::size_t j = 0; j < b; ++j) {
    if (j == row) continue;
    const double v = s(row, j);
    if (v < positive && (semi_hard == b || v > s(row, semi_hard))) semi_hard = j;
    if (easiest == b || v < s(row, easiest)) easiest = j;
  }
  return semi_hard != b ? semi_hard : easiest;
}

LossOutput shn_directional(const SimilarityMatrix& s, double margin) {
  require_contrastive_batch(s, "shn");
  if (!std::isfinite(margin)) throw ArgumentError("shn: margin must be finite");
  const std::size_t b = s.batch();
  const double scale = 1.0 / static_cast<double>(b);
  LossOutput out{0.0, Matrix(b, b)};
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t neg = shn_mine_negative(s, i);
    const double hinge = s(i, neg) - s(i, i) + margin;
    if (hinge > 0.0) {
      out.value += hinge;
      out.grad_s(i, neg) += scale;
      out.grad_s(i, i) -= scale;
    }
  }
  out.value *= scale;
  return out;
}

std::vector<double> amm_margins(const SimilarityMatrix& s, const AmmConfig& cfg) {
  require_contrastive_batch(s, "amm_margins");
  cfg.validate();
  std::vector<double> margins(s.batch());
  for (std::size_t i = 0; i < s.batch(); ++i)
    margins[i] = cfg.alpha * (s(i, i) - mean_negative(s.s, i));
  return margins;
}

LossOutput amm_directional(const SimilarityMatrix& s, const AmmConfig& cfg) {
  require_contrastive_batch(s, "amm");
  cfg.validate();
  const std::size_t b = s.batch();
  const double scale = 1.0 / static_cast<double>(b);
  const double alpha = cfg.alpha;
  const double per_negative = alpha / static_cast<double>(b - 1);
  LossOutput out{0.0, Matrix(b, b)};
  for (std::size_t i = 0; i < b; ++i) {
    // S_ii - M_i = (1 - alpha) S_ii + alpha * mean_neg
    const double positive_logit = (1.0 - alpha) * s(i, i) + alpha * mean_negative(s.s, i);
    double row_loss = 0.0;
    const double dlogit = scale * margined_row(s.s, i, positive_logit, scale, out.grad_s, row_loss);
    out.grad_s(i, i) = dlogit * (1.0 - alpha);
    for (std::size_t j = 0; j < b; ++j)
      if (j != i) out.grad_s(i, j) += dlogit * per_negative;
    out.value += row_loss;
  }
  out.value *= scale;
  return out;
}

LossOutput directional_loss(LossKind kind, const SimilarityMatrix& s, const LossParams& params) {
  switch (kind) {
    case LossKind::nce: return nce_directional(s, params.include_positive_in_nce);
    case LossKind::shn: return shn_directional(s, params.shn_margin);
    case LossKind::mms: return mms_directional(s, params.mms_margin);
    case LossKind::amm: return amm_directional(s, params.amm);
  }
  throw ArgumentError("directional_loss: unknown loss kind");
}

LossOutput bidirectional_loss(LossKind kind, const SimilarityMatrix& s, const LossParams& params) {
  LossOutput forward = directional_loss(kind, s, params);
  const LossOutput reverse = directional_loss(kind, SimilarityMatrix{transpose(s.s)}, params);
  forward.value += reverse.value;
  const std::size_t b = s.batch();
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j) forward.grad_s(i, j) += reverse.grad_s(j, i);
  return forward;
}

}  // namespace amm
