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

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "amm/numeric.hpp"

namespace amm {

/// Named feature vectors for one modality: row r of `matrix` belongs to ids[r].
///
/// On disk (EMB1, little-endian):
///   "EMB1" | u32 version = 1 | u64 n | u64 d
///   | n x (u32 byte length, UTF-8 id)
///   | n*d float64, row-major
/// Anything after the payload is rejected.
struct EmbeddingStore {
  std::vector<std::string> ids;
  Matrix matrix;

  std::size_t size() const noexcept { return ids.size(); }
  std::size_t dim() const noexcept { return matrix.cols(); }

  /// Unique ids, one per row, all values finite. Throws ValidationError.
  void validate() const;
  /// id -> row index.
  std::unordered_map<std::string, std::size_t> index() const;

  bool operator==(const EmbeddingStore&) const = default;
};

inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

std::string encode_store(const EmbeddingStore& store);
/// FormatError on bad magic/version/trailing bytes, IoError on truncation,
/// ValidationError on duplicate ids or non-finite values.
EmbeddingStore decode_store(std::string_view bytes);

void store_save(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore store_load(const std::filesystem::path& path);

enum class Split { train, eval, test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view name);

struct PairRecord {
  std::string pair_id;
  std::string x_id;
  std::string y_id;
  Split split = Split::train;

  bool operator==(const PairRecord&) const = default;
};

/// JSON array of {"pair_id", "x_id", "y_id", "split"} objects.
struct PairManifest {
  std::vector<PairRecord> pairs;

  /// Unique pair ids. Throws ValidationError.
  void validate() const;
  /// Every referenced id exists in its store. Throws ValidationError.
  void check_references(const EmbeddingStore& x, const EmbeddingStore& y) const;
  std::vector<PairRecord> select(Split split) const;

  bool operator==(const PairManifest&) const = default;
};

nlohmann::json manifest_to_json(const PairManifest& manifest);
PairManifest manifest_from_json(const nlohmann::json& j);

void manifest_save(const PairManifest& manifest, const std::filesystem::path& path);
PairManifest manifest_load(const std::filesystem::path& path);

}  // namespace amm
