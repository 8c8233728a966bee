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
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "amm/checkpoint.hpp"
#include "amm/embedding_store.hpp"
#include "amm/optim.hpp"
#include "amm/projection.hpp"
#include "amm/retrieval.hpp"
#include "amm/rng.hpp"
#include "amm/train_config.hpp"

namespace amm {

/// Video features (x), caption features (y) and the pairs linking them,
/// resolved to row indices once. When word-level caption vectors are given,
/// training pools them per caption; evaluation always reads the y store.
class Dataset {
 public:
  Dataset(EmbeddingStore x, EmbeddingStore y, PairManifest manifest,
          std::optional<EmbeddingStore> y_words = std::nullopt);

  const EmbeddingStore& x() const noexcept { return x_; }
  const EmbeddingStore& y() const noexcept { return y_; }
  const PairManifest& manifest() const noexcept { return manifest_; }
  std::span<const RowPair> split(Split s) const noexcept;
  /// Word vectors of the caption at `y_row`, or nullptr without word data.
  const Matrix* caption_words(std::size_t y_row) const noexcept;
  bool has_caption_words() const noexcept { return !words_.empty(); }

 private:
  EmbeddingStore x_;
  EmbeddingStore y_;
  PairManifest manifest_;
  std::vector<Matrix> words_;  // aligned with y rows when present
  std::vector<RowPair> train_, eval_, test_;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based, counted across both phases
  int phase = 1;
  std::vector<double> batch_losses;
  double mean_loss = 0.0;
  double eval_metric = 0.0;  // mean-direction mAP on the eval split
};

struct TrainState {
  GluMlpHead x_head;
  GluMlpHead y_head;
  AdamState x_opt;
  AdamState y_opt;
  GluMlpHead best_x_head;
  GluMlpHead best_y_head;
  double best_metric = -std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t epoch = 0;
  std::uint64_t global_step = 0;
  std::vector<EpochRecord> history;
};

/// Fresh heads (Xavier init from the seed's "init" streams) and optimizers at lr_phase1.
TrainState init_train_state(const TrainConfig& config, const Dataset& data);

/// Random stream used to evaluate a split. Training and the standalone
/// evaluator share it so their reports agree for the same seed.
Rng eval_rng(std::uint64_t seed, Split split);

/// One pass over the shuffled train split in full batches (a trailing
/// partial batch is dropped). Advances state.epoch and state.global_step and
/// returns the per-batch bidirectional losses.
std::vector<double> train_epoch(TrainState& state, const TrainConfig& config, const Dataset& data);

/// Mean-direction mAP of the current heads on the eval split.
RetrievalReport evaluate_split(const GluMlpHead& x_head, const GluMlpHead& y_head,
                               const TrainConfig& config, const Dataset& data, Split split);

struct TrainResult {
  TrainState state;
  RetrievalReport test_report;
};

/// Phase 1 at lr_phase1 for `epochs`, then phase 2 at lr_phase2 for
/// `phase2_epochs`, restarting from the best phase-1 heads with fresh Adam
/// moments. Every epoch is scored on the eval split and the best heads are
/// kept; the test report uses them.
TrainResult run_two_phase(const TrainConfig& config, const Dataset& data);

Checkpoint make_checkpoint(const TrainState& state, const TrainConfig& config);

nlohmann::json epoch_to_json(const EpochRecord& record);

enum class AblationAxis { alpha, batch_size, proj_dim, sampling, loss_kind };

std::string_view to_string(AblationAxis axis) noexcept;
AblationAxis parse_ablation_axis(std::string_view name);

/// `config` with `value` applied on `axis`. Throws ArgumentError on a value
/// that does not parse or does not validate.
TrainConfig apply_ablation_value(TrainConfig config, AblationAxis axis, std::string_view value);

struct AblationRow {
  std::string value;
  TrainConfig config;
  double best_metric = 0.0;
  RetrievalReport report;
};

/// Trains one model per value with everything else (seed included) fixed.
/// All values are validated before any training starts.
std::vector<AblationRow> ablate(const TrainConfig& config, AblationAxis axis,
                                std::span<const std::string> values, const Dataset& data);

nlohmann::json ablation_row_to_json(AblationAxis axis, const AblationRow& row);

}  // namespace amm
