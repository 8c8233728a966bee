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

#include <nlohmann/json.hpp>

#include "amm/losses.hpp"

namespace amm {

/// Training hyperparameters. Defaults are the full-scale settings (batch 2048,
/// 4096-d projection, 100 epochs, Adam at 1e-3 then 1e-5); desk_scale()
/// gives the small setup used by tests and quick experiments.
struct TrainConfig {
  LossKind loss_kind = LossKind::amm;
  double alpha = 0.5;
  double shn_margin = 1.0;
  MmsSchedule mms_schedule;
  bool include_positive_in_nce = false;
  std::size_t batch_size = 2048;
  std::size_t proj_dim = 4096;
  std::size_t hidden = 4096;
  std::size_t epochs = 100;
  double lr_phase1 = 0.001;
  double lr_phase2 = 0.00001;
  std::size_t phase2_epochs = 100;
  bool word_sampling = true;
  std::size_t caption_words = 10;
  std::uint64_t seed = 0;
  std::size_t n_samples = 5;
  std::size_t sample_size = 1000;
  std::size_t threads = 1;

  /// Batch 256, 32-d hidden and projection, 30 epochs, no second phase.
  static TrainConfig desk_scale();

  /// Throws ArgumentError on out-of-range values.
  void validate() const;

  LossParams loss_params(std::uint64_t global_step) const;

  bool operator==(const TrainConfig&) const = default;
};

nlohmann::json config_to_json(const TrainConfig& cfg);
/// Overlays the keys present in `j` onto `base`. Unknown keys and badly typed
/// values throw ArgumentError.
TrainConfig config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace amm
