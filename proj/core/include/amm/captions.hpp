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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "amm/embedding_store.hpp"
#include "amm/numeric.hpp"
#include "amm/rng.hpp"

namespace amm {

struct CaptionRecord {
  std::string id;
  std::vector<std::string> words;
  double duration_s = 0.0;
  /// One row per word, produced upstream by a language model.
  std::optional<Matrix> word_vectors;
};

/// Whitespace tokenization.
std::vector<std::string> tokenize(std::string_view transcript);

/// Parses one QC input line {"id", "transcript", "duration_s"}. FormatError
/// on malformed JSON or missing fields, ValidationError on negative duration.
CaptionRecord parse_caption_record(std::string_view json_line);

enum class PoolingMode { train, eval };

/// Caption vector from word vectors. Train mode averages k sampled rows,
/// drawn without replacement when there are at least k words and with
/// replacement otherwise. Eval mode averages every row and ignores rng.
std::vector<double> pool_caption_words(const Matrix& word_vectors, std::size_t k, Rng& rng,
                                       PoolingMode mode);

std::vector<double> sample_caption_words(const CaptionRecord& rec, std::size_t k, Rng& rng,
                                         PoolingMode mode);

inline constexpr std::size_t kDefaultCaptionWords = 10;

/// Word-level caption stores keep one row per word under the id
/// "<caption id>#<word index>". These group and ungroup them.
std::map<std::string, Matrix> group_caption_words(const EmbeddingStore& words);
EmbeddingStore flatten_caption_words(const std::vector<std::string>& caption_ids,
                                     const std::vector<Matrix>& word_vectors);

enum class QcFailure { none, word_count, uniqueness, duration };

std::string_view to_string(QcFailure reason) noexcept;

struct QcVerdict {
  QcFailure reason = QcFailure::none;
  bool pass() const noexcept { return reason == QcFailure::none; }
};

inline constexpr std::size_t kMinCaptionWords = 5;
inline constexpr double kMinCaptionSeconds = 3.0;

/// Lowercased, whitespace-collapsed transcript used for uniqueness.
std::string normalize_transcript(const std::vector<std::string>& words);

/// Checks word count (>= 5), uniqueness against `seen`, then duration
/// (>= 3 s), reporting the first failure. A passing transcript is added to
/// `seen`.
QcVerdict validate_caption(const CaptionRecord& rec, std::unordered_set<std::string>& seen);

}  // namespace amm
