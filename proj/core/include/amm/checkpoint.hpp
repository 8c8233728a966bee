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

#include <nlohmann/json.hpp>

#include "amm/projection.hpp"

namespace amm {

/// Trained projection heads for both modalities plus the config that made them.
///
/// On disk (CKP1, little-endian):
///   "CKP1" | u32 version = 1
///   | 8 x (u64 rows | u64 cols | rows*cols float64)   W1 b1 W2 b2 of x, then of y
///   | u64 byte length | UTF-8 JSON config
struct Checkpoint {
  GluMlpHead x_head;
  GluMlpHead y_head;
  nlohmann::json config = nlohmann::json::object();

  bool operator==(const Checkpoint&) const = default;
};

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);

void checkpoint_save(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint checkpoint_load(const std::filesystem::path& path);

}  // namespace amm
