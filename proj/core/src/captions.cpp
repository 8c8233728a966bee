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

#include "amm/captions.hpp"

#include <cctype>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "amm/errors.hpp"

namespace amm {

std::vector<std::string> tokenize(std::string_view transcript) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < transcript.size()) {
    while (i < transcript.size() && std::isspace(static_cast<unsigned char>(transcript[i]))) ++i;
    const std::size_t start = i;
    while (i < transcript.size() && !std::isspace(static_cast<unsigned char>(transcript[i]))) ++i;
    if (i > start) words.emplace_back(transcript.substr(start, i - start));
  }
  return words;
}

CaptionRecord parse_caption_record(std::string_view json_line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("caption record: ") + e.what());
  }
  CaptionRecord rec;
  try {
    rec.id = j.at("id").get<std::string>();
    rec.words = tokenize(j.at("transcript").get<std::string>());
    rec.duration_s = j.at("duration_s").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("caption record: ") + e.what());
  }
  if (!(rec.duration_s >= 0.0) || !std::isfinite(rec.duration_s)) {
    throw ValidationError("caption record '" + rec.id + "': duration_s must be finite and >= 0");
  }
  return rec;
}

std::vector<double> pool_caption_words(const Matrix& word_vectors, std::size_t k, Rng& rng,
                                       PoolingMode mode) {
  const std::size_t n = word_vectors.rows();
  if (n == 0) throw ArgumentError("pool_caption_words: caption has no word vectors");
  std::vector<double> out(word_vectors.cols(), 0.0);
  auto accumulate = [&](std::size_t r) {
    auto row = word_vectors.row(r);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += row[c];
  };
  std::size_t count = 0;
  if (mode == PoolingMode::eval) {
    for (std::size_t r = 0; r < n; ++r) accumulate(r);
    count = n;
  } else {
    if (k == 0) throw ArgumentError("pool_caption_words: k must be >= 1");
    for (std::size_t r : sample_indices(rng, n, k, n < k)) accumulate(r);
    count = k;
  }
  for (double& v : out) v /= static_cast<double>(count);
  return out;
}

std::vector<double> sample_caption_words(const CaptionRecord& rec, std::size_t k, Rng& rng,
                                         PoolingMode mode) {
  if (!rec.word_vectors || rec.word_vectors->rows() == 0) {
    throw ArgumentError("sample_caption_words: caption '" + rec.id + "' has no word vectors");
  }
  return pool_caption_words(*rec.word_vectors, k, rng, mode);
}

std::map<std::string, Matrix> group_caption_words(const EmbeddingStore& words) {
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> rows_by_caption;
  for (std::size_t r = 0; r < words.ids.size(); ++r) {
    const auto& id = words.ids[r];
    const auto hash = id.rfind('#');
    if (hash == std::string::npos || hash + 1 == id.size()) {
      throw ValidationError("word store: id '" + id + "' is not of the form <caption>#<index>");
    }
    std::size_t index = 0;
    try {
      std::size_t used = 0;
      index = std::stoul(id.substr(hash + 1), &used);
      if (used != id.size() - hash - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("word store: id '" + id + "' has a non-numeric word index");
    }
    rows_by_caption[id.substr(0, hash)].emplace_back(index, r);
  }
  std::map<std::string, Matrix> out;
  for (auto& [caption, entries] : rows_by_caption) {
    std::sort(entries.begin(), entries.end());
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (entries[k].first != k) {
        throw ValidationError("word store: caption '" + caption + "' word indices are not 0..n-1");
      }
      rows.push_back(entries[k].second);
    }
    out.emplace(caption, gather_rows(words.matrix, rows));
  }
  return out;
}

EmbeddingStore flatten_caption_words(const std::vector<std::string>& caption_ids,
                                     const std::vector<Matrix>& word_vectors) {
  if (caption_ids.size() != word_vectors.size()) {
    throw ArgumentError("flatten_caption_words: ids and word matrices differ in count");
  }
  std::size_t total = 0;
  std::size_t dim = word_vectors.empty() ? 0 : word_vectors.front().cols();
  for (const auto& w : word_vectors) {
    if (w.cols() != dim) throw ShapeError("flatten_caption_words: word vector widths differ");
    total += w.rows();
  }
  EmbeddingStore store;
  store.ids.reserve(total);
  std::vector<double> data;
  data.reserve(total * dim);
  for (std::size_t c = 0; c < caption_ids.size(); ++c) {
    for (std::size_t r = 0; r < word_vectors[c].rows(); ++r) {
      store.ids.push_back(caption_ids[c] + "#" + std::to_string(r));
      auto row = word_vectors[c].row(r);
      data.insert(data.end(), row.begin(), row.end());
    }
  }
  store.matrix = Matrix(total, dim, std::move(data));
  return store;
}

std::string_view to_string(QcFailure reason) noexcept {
  switch (reason) {
    case QcFailure::none: return "Pass";
    case QcFailure::word_count: return "WordCount";
    case QcFailure::uniqueness: return "Uniqueness";
    case QcFailure::duration: return "Duration";
  }
  return "Unknown";
}

std::string normalize_transcript(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    for (unsigned char c : w) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

QcVerdict validate_caption(const CaptionRecord& rec, std::unordered_set<std::string>& seen) {
  if (rec.words.size() < kMinCaptionWords) return {QcFailure::word_count};
  auto key = normalize_transcript(rec.words);
  if (seen.contains(key)) return {QcFailure::uniqueness};
  if (rec.duration_s < kMinCaptionSeconds) return {QcFailure::duration};
  seen.insert(std::move(key));
  return {QcFailure::none};
}

}  // namespace amm
