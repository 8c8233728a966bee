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

#include "amm/trainer.hpp"

#include <charconv>
#include <numeric>

#include "amm/captions.hpp"
#include "amm/errors.hpp"
#include "amm/similarity.hpp"

namespace amm {
namespace {

EvalOptions eval_options(const TrainConfig& config) {
  return {config.n_samples, config.sample_size, config.threads};
}

// Caption batch for training: pooled word vectors when available, the y
// store rows otherwise.
Matrix caption_batch(const Dataset& data, std::span<const RowPair> pairs,
                     std::span<const std::size_t> batch, const TrainConfig& config, Rng& word_rng) {
  Matrix out(batch.size(), data.y().dim());
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const std::size_t y_row = pairs[batch[r]].y_row;
    const Matrix* words = data.caption_words(y_row);
    if (words == nullptr) {
      auto src = data.y().matrix.row(y_row);
      std::copy(src.begin(), src.end(), out.row(r).begin());
      continue;
    }
    const auto mode = config.word_sampling ? PoolingMode::train : PoolingMode::eval;
    const auto pooled = pool_caption_words(*words, config.caption_words, word_rng, mode);
    std::copy(pooled.begin(), pooled.end(), out.row(r).begin());
  }
  return out;
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ArgumentError("'" + std::string(text) + "' is not a number");
  return v;
}

std::size_t parse_count(std::string_view text) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ArgumentError("'" + std::string(text) + "' is not a non-negative integer");
  return v;
}

}  // namespace

Dataset::Dataset(EmbeddingStore x, EmbeddingStore y, PairManifest manifest,
                 std::optional<EmbeddingStore> y_words)
    : x_(std::move(x)), y_(std::move(y)), manifest_(std::move(manifest)) {
  x_.validate();
  y_.validate();
  manifest_.validate();
  for (Split s : {Split::train, Split::eval, Split::test}) {
    const auto records = manifest_.select(s);
    auto rows = resolve_pairs(x_, y_, records);
    (s == Split::train ? train_ : s == Split::eval ? eval_ : test_) = std::move(rows);
  }
  if (y_words) {
    auto grouped = group_caption_words(*y_words);
    words_.resize(y_.size());
    for (std::size_t r = 0; r < y_.size(); ++r) {
      auto it = grouped.find(y_.ids[r]);
      if (it == grouped.end())
        throw ValidationError("word store has no vectors for caption '" + y_.ids[r] + "'");
      if (it->second.cols() != y_.dim())
        throw ValidationError("word vectors of caption '" + y_.ids[r] + "' have width " +
                              std::to_string(it->second.cols()) + ", caption store has " +
                              std::to_string(y_.dim()));
      words_[r] = std::move(it->second);
    }
  }
}

std::span<const RowPair> Dataset::split(Split s) const noexcept {
  switch (s) {
    case Split::train: return train_;
    case Split::eval: return eval_;
    case Split::test: return test_;
  }
  return {};
}

const Matrix* Dataset::caption_words(std::size_t y_row) const noexcept {
  return words_.empty() ? nullptr : &words_[y_row];
}

TrainState init_train_state(const TrainConfig& config, const Dataset& data) {
  config.validate();
  const Rng init = Rng(config.seed).fork("init");
  Rng x_rng = init.fork("x");
  Rng y_rng = init.fork("y");
  TrainState state;
  state.x_head = head_init({data.x().dim(), config.hidden, config.proj_dim}, x_rng);
  state.y_head = head_init({data.y().dim(), config.hidden, config.proj_dim}, y_rng);
  state.x_opt = AdamState(config.lr_phase1);
  state.y_opt = AdamState(config.lr_phase1);
  state.best_x_head = state.x_head;
  state.best_y_head = state.y_head;
  return state;
}

Rng eval_rng(std::uint64_t seed, Split split) {
  return Rng(seed).fork("eval-sample").fork(to_string(split));
}

std::vector<double> train_epoch(TrainState& state, const TrainConfig& config, const Dataset& data) {
  config.validate();
  const auto pairs = data.split(Split::train);
  if (pairs.size() < config.batch_size) {
    throw ArgumentError("train split has " + std::to_string(pairs.size()) +
                        " pairs, fewer than one batch of " + std::to_string(config.batch_size));
  }
  const Rng root(config.seed);
  Rng shuffle_rng = root.fork("train-shuffle").fork(static_cast<std::uint64_t>(state.epoch));
  Rng word_rng = root.fork("word-sample").fork(static_cast<std::uint64_t>(state.epoch));
  const auto order = permutation(shuffle_rng, pairs.size());
  const std::size_t steps = pairs.size() / config.batch_size;

  std::vector<double> losses;
  losses.reserve(steps);
  std::vector<std::size_t> x_rows(config.batch_size);
  for (std::size_t step = 0; step < steps; ++step) {
    const std::span<const std::size_t> batch(order.data() + step * config.batch_size,
                                             config.batch_size);
    for (std::size_t r = 0; r < batch.size(); ++r) x_rows[r] = pairs[batch[r]].x_row;
    const Matrix videos = gather_rows(data.x().matrix, x_rows);
    const Matrix captions = caption_batch(data, pairs, batch, config, word_rng);

    const HeadForward fx = head_forward(state.x_head, videos);
    const HeadForward fy = head_forward(state.y_head, captions);
    const SimilarityMatrix s = similarity_forward(fx.out, fy.out);
    const LossOutput loss =
        bidirectional_loss(config.loss_kind, s, config.loss_params(state.global_step));
    const SimilarityGradients gs = similarity_backward(loss.grad_s, fx.out, fy.out);
    const HeadBackward bx = head_backward(state.x_head, fx.cache, gs.grad_x);
    const HeadBackward by = head_backward(state.y_head, fy.cache, gs.grad_y);
    adam_step(state.x_opt, state.x_head, bx.grad_params);
    adam_step(state.y_opt, state.y_head, by.grad_params);

    ++state.global_step;
    losses.push_back(loss.value);
  }
  ++state.epoch;
  return losses;
}

RetrievalReport evaluate_split(const GluMlpHead& x_head, const GluMlpHead& y_head,
                               const TrainConfig& config, const Dataset& data, Split split) {
  return eval_protocol(
      data.x().matrix, data.y().matrix, data.split(split),
      [&](const Matrix& m) { return head_project(x_head, m); },
      [&](const Matrix& m) { return head_project(y_head, m); }, eval_options(config),
      eval_rng(config.seed, split));
}

TrainResult run_two_phase(const TrainConfig& config, const Dataset& data) {
  TrainResult result{init_train_state(config, data), {}};
  TrainState& state = result.state;

  auto run_epoch = [&](int phase) {
    EpochRecord rec;
    rec.phase = phase;
    rec.batch_losses = train_epoch(state, config, data);
    rec.epoch = state.epoch;
    rec.mean_loss = std::accumulate(rec.batch_losses.begin(), rec.batch_losses.end(), 0.0) /
                    static_cast<double>(rec.batch_losses.size());
    rec.eval_metric =
        evaluate_split(state.x_head, state.y_head, config, data, Split::eval).mean.map.mean;
    if (rec.eval_metric > state.best_metric) {
      state.best_metric = rec.eval_metric;
      state.best_epoch = rec.epoch;
      state.best_x_head = state.x_head;
      state.best_y_head = state.y_head;
    }
    state.history.push_back(std::move(rec));
  };

  for (std::size_t e = 0; e < config.epochs; ++e) run_epoch(1);

  if (config.phase2_epochs > 0) {
    state.x_head = state.best_x_head;
    state.y_head = state.best_y_head;
    state.x_opt = AdamState(config.lr_phase2);
    state.y_opt = AdamState(config.lr_phase2);
    for (std::size_t e = 0; e < config.phase2_epochs; ++e) run_epoch(2);
  }

  result.test_report =
      evaluate_split(state.best_x_head, state.best_y_head, config, data, Split::test);
  return result;
}

Checkpoint make_checkpoint(const TrainState& state, const TrainConfig& config) {
  return {state.best_x_head, state.best_y_head, config_to_json(config)};
}

nlohmann::json epoch_to_json(const EpochRecord& r) {
  return {{"epoch", r.epoch},
          {"phase", r.phase},
          {"mean_loss", r.mean_loss},
          {"batch_losses", r.batch_losses},
          {"eval_mean_map", r.eval_metric}};
}

std::string_view to_string(AblationAxis axis) noexcept {
  switch (axis) {
    case AblationAxis::alpha: return "alpha";
    case AblationAxis::batch_size: return "batch_size";
    case AblationAxis::proj_dim: return "proj_dim";
    case AblationAxis::sampling: return "sampling";
    case AblationAxis::loss_kind: return "loss_kind";
  }
  return "unknown";
}

AblationAxis parse_ablation_axis(std::string_view name) {
  for (auto axis : {AblationAxis::alpha, AblationAxis::batch_size, AblationAxis::proj_dim,
                    AblationAxis::sampling, AblationAxis::loss_kind}) {
    if (name == to_string(axis)) return axis;
  }
  throw ArgumentError("unknown ablation axis '" + std::string(name) +
                      "' (expected alpha|batch_size|proj_dim|sampling|loss_kind)");
}

TrainConfig apply_ablation_value(TrainConfig config, AblationAxis axis, std::string_view value) {
  switch (axis) {
    case AblationAxis::alpha: config.alpha = parse_double(value); break;
    case AblationAxis::batch_size: config.batch_size = parse_count(value); break;
    case AblationAxis::proj_dim: config.proj_dim = parse_count(value); break;
    case AblationAxis::sampling:
      if (value == "on" || value == "true") config.word_sampling = true;
      else if (value == "off" || value == "false") config.word_sampling = false;
      else throw ArgumentError("sampling value must be on|off, got '" + std::string(value) + "'");
      break;
    case AblationAxis::loss_kind: config.loss_kind = parse_loss_kind(value); break;
  }
  config.validate();
  return config;
}

std::vector<AblationRow> ablate(const TrainConfig& config, AblationAxis axis,
                                std::span<const std::string> values, const Dataset& data) {
  if (values.empty()) throw ArgumentError("ablate: no values given");
  std::vector<AblationRow> rows;
  for (const auto& v : values) {
    AblationRow row;
    row.value = v;
    try {
      row.config = apply_ablation_value(config, axis, v);
    } catch (const ArgumentError& e) {
      throw ArgumentError("ablate: invalid " + std::string(to_string(axis)) + " value '" + v +
                          "': " + e.what());
    }
    if (row.config.batch_size > data.split(Split::train).size()) {
      throw ArgumentError("ablate: batch_size " + std::to_string(row.config.batch_size) +
                          " exceeds the train split");
    }
    rows.push_back(std::move(row));
  }
  for (auto& row : rows) {
    const TrainResult result = run_two_phase(row.config, data);
    row.best_metric = result.state.best_metric;
    row.report = result.test_report;
  }
  return rows;
}

nlohmann::json ablation_row_to_json(AblationAxis axis, const AblationRow& row) {
  return {{"axis", std::string(to_string(axis))},
          {"value", row.value},
          {"best_eval_mean_map", row.best_metric},
          {"config", config_to_json(row.config)},
          {"report", report_to_json(row.report)}};
}

}  // namespace amm
