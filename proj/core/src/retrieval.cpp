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

#include "amm/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "amm/errors.hpp"

namespace amm {
namespace {

DirectionMetrics average(const DirectionMetrics& a, const DirectionMetrics& b) {
  return {(a.r_at_1 + b.r_at_1) / 2.0, (a.r_at_5 + b.r_at_5) / 2.0, (a.r_at_10 + b.r_at_10) / 2.0,
          (a.map + b.map) / 2.0};
}

using Direction = DirectionMetrics SampleMetrics::*;
using Field = double DirectionMetrics::*;

Stat stat_of(std::span<const SampleMetrics> samples, Direction dir, Field field) {
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (const auto& s : samples) sum += s.*dir.*field;
  const double mean = sum / n;
  if (samples.size() < 2) return {mean, 0.0};
  double sq = 0.0;
  for (const auto& s : samples) {
    const double d = s.*dir.*field - mean;
    sq += d * d;
  }
  return {mean, std::sqrt(sq / (n - 1.0))};
}

DirectionSummary summarize_direction(std::span<const SampleMetrics> samples, Direction dir) {
  return {stat_of(samples, dir, &DirectionMetrics::r_at_1),
          stat_of(samples, dir, &DirectionMetrics::r_at_5),
          stat_of(samples, dir, &DirectionMetrics::r_at_10),
          stat_of(samples, dir, &DirectionMetrics::map)};
}

nlohmann::json direction_json(const DirectionSummary& d) {
  auto stat = [](const Stat& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.std}}; };
  return {{"r_at_1", stat(d.r_at_1)},
          {"r_at_5", stat(d.r_at_5)},
          {"r_at_10", stat(d.r_at_10)},
          {"map", stat(d.map)}};
}

DirectionSummary direction_from_json(const nlohmann::json& j) {
  auto stat = [](const nlohmann::json& s) {
    return Stat{s.at("mean").get<double>(), s.at("std").get<double>()};
  };
  return {stat(j.at("r_at_1")), stat(j.at("r_at_5")), stat(j.at("r_at_10")), stat(j.at("map"))};
}

SampleMetrics evaluate_subset(const Matrix& x, const Matrix& y, std::span<const RowPair> pairs,
                              std::span<const std::size_t> subset, const Projector& project_x,
                              const Projector& project_y) {
  std::vector<std::size_t> xr, yr;
  xr.reserve(subset.size());
  yr.reserve(subset.size());
  for (std::size_t k : subset) {
    xr.push_back(pairs[k].x_row);
    yr.push_back(pairs[k].y_row);
  }
  const Matrix videos = project_x(gather_rows(x, xr));
  const Matrix captions = project_y(gather_rows(y, yr));
  // Rows are captions so that row queries read caption -> video.
  return retrieval_metrics(similarity_forward(captions, videos));
}

}  // namespace

std::size_t rank_of_positive(std::span<const double> scores, std::size_t positive) {
  if (positive >= scores.size()) {
    throw ArgumentError("rank_of_positive: index " + std::to_string(positive) + " out of range for " +
                        std::to_string(scores.size()) + " scores");
  }
  const double target = scores[positive];
  std::size_t rank = 1;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > target || (j < positive && scores[j] == target)) ++rank;
  }
  return rank;
}

DirectionMetrics metrics_from_ranks(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw ArgumentError("metrics_from_ranks: no queries");
  std::size_t hit1 = 0, hit5 = 0, hit10 = 0;
  double rr = 0.0;
  for (std::size_t r : ranks) {
    hit1 += r <= 1;
    hit5 += r <= 5;
    hit10 += r <= 10;
    rr += 1.0 / static_cast<double>(r);
  }
  const auto n = static_cast<double>(ranks.size());
  return {static_cast<double>(hit1) / n, static_cast<double>(hit5) / n,
          static_cast<double>(hit10) / n, rr / n};
}

SampleMetrics retrieval_metrics(const SimilarityMatrix& s) {
  const std::size_t n = s.s.rows();
  if (n != s.s.cols()) {
    throw ShapeError("retrieval_metrics: similarity matrix must be square, got " + s.s.shape_string());
  }
  if (n == 0) throw ArgumentError("retrieval_metrics: empty similarity matrix");
  std::vector<std::size_t> row_ranks(n), col_ranks(n);
  std::vector<double> column(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_ranks[i] = rank_of_positive(s.s.row(i), i);
    for (std::size_t j = 0; j < n; ++j) column[j] = s(j, i);
    col_ranks[i] = rank_of_positive(column, i);
  }
  SampleMetrics m;
  m.c2v = metrics_from_ranks(row_ranks);
  m.v2c = metrics_from_ranks(col_ranks);
  m.mean = average(m.c2v, m.v2c);
  return m;
}

RetrievalReport summarize(std::span<const SampleMetrics> samples, std::size_t sample_size) {
  if (samples.empty()) throw ArgumentError("summarize: no samples");
  RetrievalReport r;
  r.n_samples = samples.size();
  r.sample_size = sample_size;
  r.c2v = summarize_direction(samples, &SampleMetrics::c2v);
  r.v2c = summarize_direction(samples, &SampleMetrics::v2c);
  r.mean = summarize_direction(samples, &SampleMetrics::mean);
  return r;
}

nlohmann::json report_to_json(const RetrievalReport& report) {
  return {{"c2v", direction_json(report.c2v)},
          {"v2c", direction_json(report.v2c)},
          {"mean", direction_json(report.mean)},
          {"n_samples", report.n_samples},
          {"sample_size", report.sample_size},
          {"std_estimator", "sample"}};
}

RetrievalReport report_from_json(const nlohmann::json& j) {
  try {
    RetrievalReport r;
    r.c2v = direction_from_json(j.at("c2v"));
    r.v2c = direction_from_json(j.at("v2c"));
    r.mean = direction_from_json(j.at("mean"));
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.sample_size = j.at("sample_size").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("retrieval report: ") + e.what());
  }
}

RetrievalReport eval_protocol(const Matrix& x, const Matrix& y, std::span<const RowPair> pairs,
                              const Projector& project_x, const Projector& project_y,
                              const EvalOptions& options, const Rng& rng) {
  if (pairs.empty()) throw ArgumentError("eval_protocol: evaluation split is empty");
  if (options.n_samples == 0 || options.sample_size == 0)
    throw ArgumentError("eval_protocol: n_samples and sample_size must be >= 1");
  for (const auto& p : pairs) {
    if (p.x_row >= x.rows() || p.y_row >= y.rows())
      throw ArgumentError("eval_protocol: pair row out of range");
  }

  if (pairs.size() <= options.sample_size) {
    std::vector<std::size_t> all(pairs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const SampleMetrics only = evaluate_subset(x, y, pairs, all, project_x, project_y);
    return summarize(std::span(&only, 1), pairs.size());
  }

  std::vector<SampleMetrics> samples(options.n_samples);
  auto run = [&](std::size_t k) {
    Rng sample_rng = rng.fork(static_cast<std::uint64_t>(k));
    const auto subset = sample_indices(sample_rng, pairs.size(), options.sample_size, false);
    samples[k] = evaluate_subset(x, y, pairs, subset, project_x, project_y);
  };
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, options.n_samples);
  if (threads == 1) {
    for (std::size_t k = 0; k < options.n_samples; ++k) run(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < options.n_samples; k += threads) run(k);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return summarize(samples, options.sample_size);
}

std::vector<RowPair> resolve_pairs(const EmbeddingStore& x, const EmbeddingStore& y,
                                   std::span<const PairRecord> pairs) {
  const auto xi = x.index();
  const auto yi = y.index();
  std::vector<RowPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    auto xa = xi.find(p.x_id);
    auto ya = yi.find(p.y_id);
    if (xa == xi.end())
      throw ValidationError("pair '" + p.pair_id + "' references unknown x_id '" + p.x_id + "'");
    if (ya == yi.end())
      throw ValidationError("pair '" + p.pair_id + "' references unknown y_id '" + p.y_id + "'");
    out.push_back({xa->second, ya->second});
  }
  return out;
}

RetrievalReport eval_protocol(const EmbeddingStore& x, const EmbeddingStore& y,
                              std::span<const PairRecord> pairs, const GluMlpHead& x_head,
                              const GluMlpHead& y_head, const EvalOptions& options, const Rng& rng) {
  const auto rows = resolve_pairs(x, y, pairs);
  return eval_protocol(
      x.matrix, y.matrix, rows, [&](const Matrix& m) { return head_project(x_head, m); },
      [&](const Matrix& m) { return head_project(y_head, m); }, options, rng);
}

}  // namespace amm
