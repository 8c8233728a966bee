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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "amm/embedding_store.hpp"
#include "amm/projection.hpp"
#include "amm/rng.hpp"
#include "amm/similarity.hpp"

namespace amm {

struct DirectionMetrics {
  double r_at_1 = 0.0;
  double r_at_5 = 0.0;
  double r_at_10 = 0.0;
  double map = 0.0;

  bool operator==(const DirectionMetrics&) const = default;
};

/// Metrics of one evaluation sample. `mean` averages the two directions.
struct SampleMetrics {
  DirectionMetrics c2v;
  DirectionMetrics v2c;
  DirectionMetrics mean;

  bool operator==(const SampleMetrics&) const = default;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation, 0 for one sample

  bool operator==(const Stat&) const = default;
};

struct DirectionSummary {
  Stat r_at_1;
  Stat r_at_5;
  Stat r_at_10;
  Stat map;

  bool operator==(const DirectionSummary&) const = default;
};

struct RetrievalReport {
  DirectionSummary c2v;
  DirectionSummary v2c;
  DirectionSummary mean;
  std::size_t n_samples = 0;
  std::size_t sample_size = 0;

  bool operator==(const RetrievalReport&) const = default;
};

/// 1-based rank of scores[positive]. Items scoring strictly higher rank
/// ahead, and equal scores at a lower index also rank ahead.
std::size_t rank_of_positive(std::span<const double> scores, std::size_t positive);

/// R@k is the fraction of ranks <= k; mAP is the mean reciprocal rank (one
/// relevant item per query).
DirectionMetrics metrics_from_ranks(std::span<const std::size_t> ranks);

/// Rows of `s` are caption queries over video columns (caption -> video);
/// the video -> caption direction reads the columns. Positives on the diagonal.
SampleMetrics retrieval_metrics(const SimilarityMatrix& s);

RetrievalReport summarize(std::span<const SampleMetrics> samples, std::size_t sample_size);

nlohmann::json report_to_json(const RetrievalReport& report);
RetrievalReport report_from_json(const nlohmann::json& j);

/// Aligned (video row, caption row) pair within two feature matrices.
struct RowPair {
  std::size_t x_row = 0;
  std::size_t y_row = 0;

  bool operator==(const RowPair&) const = default;
};

using Projector = std::function<Matrix(const Matrix&)>;

struct EvalOptions {
  std::size_t n_samples = 5;
  std::size_t sample_size = 1000;
  /// Samples are evaluated on up to this many threads. Each sample has its
  /// own forked stream, so the report does not depend on the thread count.
  std::size_t threads = 1;
};

/// Draws n_samples subsets of sample_size pairs (without replacement within a
/// subset, independently across subsets), projects videos (x) and captions
/// (y), and summarizes the retrieval metrics. When the split holds no more
/// than sample_size pairs, the whole split is evaluated once in order.
RetrievalReport eval_protocol(const Matrix& x, const Matrix& y, std::span<const RowPair> pairs,
                              const Projector& project_x, const Projector& project_y,
                              const EvalOptions& options, const Rng& rng);

RetrievalReport eval_protocol(const EmbeddingStore& x, const EmbeddingStore& y,
                              std::span<const PairRecord> pairs, const GluMlpHead& x_head,
                              const GluMlpHead& y_head, const EvalOptions& options, const Rng& rng);

/// Resolves manifest ids to rows. Throws ValidationError on unknown ids.
std::vector<RowPair> resolve_pairs(const EmbeddingStore& x, const EmbeddingStore& y,
                                   std::span<const PairRecord> pairs);

}  // namespace amm
