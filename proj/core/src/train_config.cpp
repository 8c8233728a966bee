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

#include "amm/train_config.hpp"

#include <cmath>
#include <string>

#include "amm/errors.hpp"

namespace amm {

TrainConfig TrainConfig::desk_scale() {
  TrainConfig cfg;
  cfg.batch_size = 256;
  cfg.proj_dim = 32;
  cfg.hidden = 32;
  cfg.epochs = 30;
  cfg.phase2_epochs = 0;
  return cfg;
}

void TrainConfig::validate() const {
  if (batch_size < 2) throw ArgumentError("batch_size must be >= 2 (contrastive losses need negatives)");
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (proj_dim < 1 || hidden < 1) throw ArgumentError("proj_dim and hidden must be >= 1");
  if (caption_words < 1) throw ArgumentError("caption_words must be >= 1");
  if (n_samples < 1 || sample_size < 1) throw ArgumentError("n_samples and sample_size must be >= 1");
  if (!(lr_phase1 >= 0.0) || !std::isfinite(lr_phase1) || !(lr_phase2 >= 0.0) ||
      !std::isfinite(lr_phase2))
    throw ArgumentError("learning rates must be finite and >= 0");
  if (!std::isfinite(shn_margin)) throw ArgumentError("shn_margin must be finite");
  AmmConfig{alpha}.validate();
  mms_schedule.validate();
}

LossParams TrainConfig::loss_params(std::uint64_t global_step) const {
  LossParams p;
  p.mms_margin = mms_margin_at(mms_schedule, global_step);
  p.shn_margin = shn_margin;
  p.amm.alpha = alpha;
  p.include_positive_in_nce = include_positive_in_nce;
  return p;
}

nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"loss_kind", std::string(to_string(c.loss_kind))},
          {"alpha", c.alpha},
          {"shn_margin", c.shn_margin},
          {"mms_schedule",
           {{"initial", c.mms_schedule.initial},
            {"growth", c.mms_schedule.growth},
            {"period_steps", c.mms_schedule.period_steps}}},
          {"include_positive_in_nce", c.include_positive_in_nce},
          {"batch_size", c.batch_size},
          {"proj_dim", c.proj_dim},
          {"hidden", c.hidden},
          {"epochs", c.epochs},
          {"lr_phase1", c.lr_phase1},
          {"lr_phase2", c.lr_phase2},
          {"phase2_epochs", c.phase2_epochs},
          {"word_sampling", c.word_sampling},
          {"caption_words", c.caption_words},
          {"seed", c.seed},
          {"n_samples", c.n_samples},
          {"sample_size", c.sample_size}};
}

TrainConfig config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw ArgumentError("train config: expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "loss_kind") c.loss_kind = parse_loss_kind(value.get<std::string>());
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "shn_margin") c.shn_margin = value.get<double>();
      else if (key == "mms_schedule") {
        for (const auto& [k, v] : value.items()) {
          if (k == "initial") c.mms_schedule.initial = v.get<double>();
          else if (k == "growth") c.mms_schedule.growth = v.get<double>();
          else if (k == "period_steps") c.mms_schedule.period_steps = v.get<std::uint64_t>();
          else throw ArgumentError("train config: unknown mms_schedule key '" + k + "'");
        }
      }
      else if (key == "include_positive_in_nce") c.include_positive_in_nce = value.get<bool>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "proj_dim") c.proj_dim = value.get<std::size_t>();
      else if (key == "hidden") c.hidden = value.get<std::size_t>();
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "lr_phase1") c.lr_phase1 = value.get<double>();
      else if (key == "lr_phase2") c.lr_phase2 = value.get<double>();
      else if (key == "phase2_epochs") c.phase2_epochs = value.get<std::size_t>();
      else if (key == "word_sampling") c.word_sampling = value.get<bool>();
      else if (key == "caption_words") c.caption_words = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "n_samples") c.n_samples = value.get<std::size_t>();
      else if (key == "sample_size") c.sample_size = value.get<std::size_t>();
      else if (key == "threads") c.threads = value.get<std::size_t>();
      else throw ArgumentError("train config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("train config: ") + e.what());
  }
  return c;
}

}  // namespace amm
