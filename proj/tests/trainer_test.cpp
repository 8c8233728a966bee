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

#include <gtest/gtest.h>

#include "amm/errors.hpp"
#include "amm/synthetic.hpp"
#include "amm/trainer.hpp"

namespace amm {
namespace {

Dataset make_dataset(const SyntheticSpec& spec) {
  auto d = synth_generate(spec);
  return Dataset(std::move(d.x), std::move(d.y), std::move(d.manifest), std::move(d.y_words));
}

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.n_pairs = 400;
  spec.d_latent = 4;
  spec.d_x = 8;
  spec.d_y = 6;
  spec.noise_sigma = 0.3;
  spec.seed = 3;
  return spec;
}

TrainConfig small_config() {
  TrainConfig cfg = TrainConfig::desk_scale();
  cfg.batch_size = 32;
  cfg.hidden = 8;
  cfg.proj_dim = 8;
  cfg.epochs = 3;
  cfg.seed = 5;
  cfg.sample_size = 100;
  return cfg;
}

TEST(TrainEpoch, ZeroLearningRateLeavesParametersUnchanged) {
  const Dataset data = make_dataset(small_spec());
  TrainConfig cfg = small_config();
  cfg.lr_phase1 = 0.0;
  TrainState state = init_train_state(cfg, data);
  const auto x0 = state.x_head;
  const auto y0 = state.y_head;
  const auto losses = train_epoch(state, cfg, data);
  EXPECT_EQ(state.x_head, x0);
  EXPECT_EQ(state.y_head, y0);
  EXPECT_EQ(losses.size(), 320u / 32u);
}

TEST(TrainEpoch, DropsTrailingPartialBatch) {
  const Dataset data = make_dataset(small_spec());
  TrainConfig cfg = small_config();
  cfg.batch_size = 50;  // 320 train pairs -> 6 full batches
  TrainState state = init_train_state(cfg, data);
  EXPECT_EQ(train_epoch(state, cfg, data).size(), 6u);
  EXPECT_EQ(state.global_step, 6u);
  EXPECT_EQ(state.epoch, 1u);
}

TEST(TrainEpoch, SplitSmallerThanBatchThrows) {
  const Dataset data = make_dataset(small_spec());
  TrainConfig cfg = small_config();
  cfg.batch_size = 321;
  TrainState state = init_train_state(cfg, data);
  EXPECT_THROW(train_epoch(state, cfg, data), ArgumentError);
}

TEST(TrainEpoch, Deterministic) {
  const Dataset data = make_dataset(small_spec());
  const TrainConfig cfg = small_config();
  TrainState a = init_train_state(cfg, data);
  TrainState b = init_train_state(cfg, data);
  for (int e = 0; e < 2; ++e) EXPECT_EQ(train_epoch(a, cfg, data), train_epoch(b, cfg, data));
  EXPECT_EQ(a.x_head, b.x_head);
  EXPECT_EQ(a.y_head, b.y_head);
}

TEST(TrainEpoch, AmmLossDecreasesOnNoiselessIdentityData) {
  SyntheticSpec spec = small_spec();
  spec.n_pairs = 1000;
  spec.d_latent = spec.d_x = spec.d_y = 8;
  spec.identity_maps = true;
  spec.noise_sigma = 0.0;
  const Dataset data = make_dataset(spec);
  TrainConfig cfg = small_config();
  cfg.loss_kind = LossKind::amm;
  cfg.alpha = 0.5;
  cfg.lr_phase1 = 0.001;
  cfg.batch_size = 64;
  cfg.hidden = cfg.proj_dim = 16;
  TrainState state = init_train_state(cfg, data);
  double previous = 1e300;
  for (int e = 0; e < 5; ++e) {
    const auto losses = train_epoch(state, cfg, data);
    double mean = 0.0;
    for (double l : losses) mean += l;
    mean /= static_cast<double>(losses.size());
    EXPECT_LT(mean, previous) << "epoch " << e;
    previous = mean;
  }
}

TEST(TrainEpoch, WordSamplingChangesTrainingOnlyWhenWordsExist) {
  SyntheticSpec spec = small_spec();
  spec.caption_words = 5;
  const Dataset with_words = make_dataset(spec);
  TrainConfig on = small_config();
  TrainConfig off = on;
  off.word_sampling = false;
  TrainState a = init_train_state(on, with_words);
  TrainState b = init_train_state(off, with_words);
  EXPECT_NE(train_epoch(a, on, with_words), train_epoch(b, off, with_words));

  // Without word vectors pooling is a no-op, so the flag has no effect.
  const Dataset plain = make_dataset(small_spec());
  TrainState c = init_train_state(on, plain);
  TrainState d = init_train_state(off, plain);
  EXPECT_EQ(train_epoch(c, on, plain), train_epoch(d, off, plain));
}

TEST(TwoPhase, BestMetricIsMaxOfHistoryAndReproducible) {
  const Dataset data = make_dataset(small_spec());
  TrainConfig cfg = small_config();
  cfg.phase2_epochs = 2;
  const auto result = run_two_phase(cfg, data);
  const auto& st = result.state;
  ASSERT_EQ(st.history.size(), 5u);
  double best = -1.0;
  for (const auto& rec : st.history) {
    EXPECT_GE(st.best_metric, rec.eval_metric);
    best = std::max(best, rec.eval_metric);
  }
  EXPECT_EQ(st.best_metric, best);
  EXPECT_EQ(st.history[3].phase, 2);
  EXPECT_EQ(st.x_opt.lr, cfg.lr_phase2);
  EXPECT_EQ(st.global_step, 5u * 10u);
  const double again =
      evaluate_split(st.best_x_head, st.best_y_head, cfg, data, Split::eval).mean.map.mean;
  EXPECT_NEAR(again, st.best_metric, 1e-12);
  const auto test_again = evaluate_split(st.best_x_head, st.best_y_head, cfg, data, Split::test);
  EXPECT_EQ(test_again, result.test_report);
}

TEST(TwoPhase, NoSecondPhaseMatchesPlainPhaseOneLoop) {
  const Dataset data = make_dataset(small_spec());
  TrainConfig cfg = small_config();
  cfg.phase2_epochs = 0;
  const auto result = run_two_phase(cfg, data);

  TrainState manual = init_train_state(cfg, data);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    EXPECT_EQ(train_epoch(manual, cfg, data), result.state.history[e].batch_losses);
  }
  EXPECT_EQ(manual.x_head, result.state.x_head);
  EXPECT_EQ(manual.y_head, result.state.y_head);
  EXPECT_EQ(result.state.history.size(), cfg.epochs);
}

TEST(TwoPhase, DeterministicEndToEnd) {
  const Dataset data = make_dataset(small_spec());
  TrainConfig cfg = small_config();
  cfg.loss_kind = LossKind::mms;
  const auto a = run_two_phase(cfg, data);
  const auto b = run_two_phase(cfg, data);
  EXPECT_EQ(a.test_report, b.test_report);
  EXPECT_EQ(encode_checkpoint(make_checkpoint(a.state, cfg)),
            encode_checkpoint(make_checkpoint(b.state, cfg)));
}

TEST(Ablate, AlphaSweepProducesOneRowPerValue) {
  const Dataset data = make_dataset(small_spec());
  TrainConfig cfg = small_config();
  cfg.epochs = 1;
  std::vector<std::string> values;
  for (int i = 1; i <= 9; ++i) values.push_back("0." + std::to_string(i));
  const auto rows = ablate(cfg, AblationAxis::alpha, values, data);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_DOUBLE_EQ(rows[0].config.alpha, 0.1);
  EXPECT_DOUBLE_EQ(rows[8].config.alpha, 0.9);
  EXPECT_EQ(ablation_row_to_json(AblationAxis::alpha, rows[2]).at("axis"), "alpha");
}

TEST(Ablate, SingleValueEqualsDirectRun) {
  const Dataset data = make_dataset(small_spec());
  const TrainConfig cfg = small_config();
  const std::string values[] = {"32"};
  const auto rows = ablate(cfg, AblationAxis::batch_size, values, data);
  ASSERT_EQ(rows.size(), 1u);
  const auto direct = run_two_phase(cfg, data);
  EXPECT_EQ(rows[0].report, direct.test_report);
  EXPECT_EQ(rows[0].best_metric, direct.state.best_metric);
}

TEST(Ablate, SamplingAxisChangesOnlyTheFlag) {
  const Dataset data = make_dataset(small_spec());
  TrainConfig cfg = small_config();
  cfg.epochs = 1;
  const std::string values[] = {"on", "off"};
  const auto rows = ablate(cfg, AblationAxis::sampling, values, data);
  ASSERT_EQ(rows.size(), 2u);
  TrainConfig expected_off = rows[0].config;
  expected_off.word_sampling = false;
  EXPECT_TRUE(rows[0].config.word_sampling);
  EXPECT_EQ(rows[1].config, expected_off);
}

TEST(Ablate, InvalidValuesRejectedBeforeTraining) {
  const Dataset data = make_dataset(small_spec());
  const TrainConfig cfg = small_config();
  const std::string alphas[] = {"0.5", "1.5"};
  EXPECT_THROW(ablate(cfg, AblationAxis::alpha, alphas, data), ArgumentError);
  const std::string batches[] = {"1"};
  EXPECT_THROW(ablate(cfg, AblationAxis::batch_size, batches, data), ArgumentError);
  const std::string big[] = {"10000"};
  EXPECT_THROW(ablate(cfg, AblationAxis::batch_size, big, data), ArgumentError);
  const std::string kinds[] = {"triplet"};
  EXPECT_THROW(ablate(cfg, AblationAxis::loss_kind, kinds, data), ArgumentError);
  EXPECT_THROW(ablate(cfg, AblationAxis::alpha, std::span<const std::string>{}, data), ArgumentError);
  EXPECT_THROW(parse_ablation_axis("lr"), ArgumentError);
}

TEST(TrainConfigJson, RoundTripAndOverlay) {
  TrainConfig cfg = small_config();
  cfg.loss_kind = LossKind::shn;
  cfg.mms_schedule.period_steps = 17;
  EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
  const auto overlaid = config_from_json(nlohmann::json{{"alpha", 0.25}}, cfg);
  EXPECT_EQ(overlaid.alpha, 0.25);
  EXPECT_EQ(overlaid.batch_size, cfg.batch_size);
  EXPECT_THROW(config_from_json(nlohmann::json{{"learning_rate", 1}}), ArgumentError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"batch_size", "big"}}), ArgumentError);
}

TEST(TrainConfigDefaults, FullScaleValues) {
  const TrainConfig cfg;
  EXPECT_EQ(cfg.batch_size, 2048u);
  EXPECT_EQ(cfg.proj_dim, 4096u);
  EXPECT_EQ(cfg.epochs, 100u);
  EXPECT_EQ(cfg.lr_phase1, 0.001);
  EXPECT_EQ(cfg.lr_phase2, 0.00001);
  EXPECT_EQ(cfg.alpha, 0.5);
  EXPECT_EQ(cfg.shn_margin, 1.0);
  EXPECT_EQ(cfg.mms_schedule.initial, 0.001);
  EXPECT_EQ(cfg.mms_schedule.growth, 1.002);
  EXPECT_EQ(cfg.mms_schedule.period_steps, 1000u);
  EXPECT_EQ(cfg.caption_words, 10u);
}

TEST(DatasetValidation, MissingCaptionWordsRejected) {
  SyntheticSpec spec = small_spec();
  spec.caption_words = 3;
  auto d = synth_generate(spec);
  auto words = *d.y_words;
  words.ids.resize(1);
  words.matrix = Matrix(1, words.matrix.cols());
  EXPECT_THROW(Dataset(d.x, d.y, d.manifest, words), ValidationError);
}

}  // namespace
}  // namespace amm
