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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "amm/captions.hpp"
#include "amm/checkpoint.hpp"
#include "amm/embedding_store.hpp"
#include "amm/errors.hpp"
#include "amm/io.hpp"
#include "amm/retrieval.hpp"
#include "amm/synthetic.hpp"
#include "amm/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

json load_json_file(const fs::path& path) {
  const std::string text = amm::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw amm::FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { amm::write_file_atomic(path, j.dump(2) + "\n"); }

void write_jsonl(const fs::path& path, const std::vector<json>& lines) {
  std::string out;
  for (const auto& line : lines) out += line.dump() + "\n";
  amm::write_file_atomic(path, out);
}

amm::SyntheticSpec synth_spec_from_json(const json& j, amm::SyntheticSpec spec) {
  if (!j.is_object()) throw amm::ArgumentError("synth config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "n_pairs") spec.n_pairs = value.get<std::size_t>();
      else if (key == "d_latent") spec.d_latent = value.get<std::size_t>();
      else if (key == "d_x") spec.d_x = value.get<std::size_t>();
      else if (key == "d_y") spec.d_y = value.get<std::size_t>();
      else if (key == "noise_sigma") spec.noise_sigma = value.get<double>();
      else if (key == "seed") spec.seed = value.get<std::uint64_t>();
      else if (key == "identity_maps") spec.identity_maps = value.get<bool>();
      else if (key == "caption_words") spec.caption_words = value.get<std::size_t>();
      else throw amm::ArgumentError("synth config: unknown key '" + key + "'");
    } catch (const json::type_error& e) {
      throw amm::ArgumentError("synth config: bad value for '" + key + "': " + e.what());
    }
  }
  return spec;
}

std::size_t threads_from_env() {
  const char* raw = std::getenv("AMM_ALIGN_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(raw, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != std::string_view(raw).size() || value == 0) {
    throw amm::ArgumentError(std::string("AMM_ALIGN_THREADS must be a positive integer, got '") + raw + "'");
  }
  return static_cast<std::size_t>(value);
}

amm::Dataset load_dataset(const fs::path& dir) {
  auto x = amm::store_load(dir / "x.emb");
  auto y = amm::store_load(dir / "y.emb");
  auto manifest = amm::manifest_load(dir / "manifest.json");
  std::optional<amm::EmbeddingStore> words;
  if (fs::exists(dir / "y_words.emb")) words = amm::store_load(dir / "y_words.emb");
  return amm::Dataset(std::move(x), std::move(y), std::move(manifest), std::move(words));
}

std::vector<std::string> split_values(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw amm::ArgumentError("--values: empty entry in '" + csv + "'");
    out.push_back(item);
  }
  return out;
}

struct SynthArgs {
  std::string config;
  std::string out;
  std::optional<std::size_t> n, d_latent, d_x, d_y, caption_words;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  bool identity_maps = false;
};

// Raw flag values shared by train, eval and ablate.
struct TrainArgs {
  std::string config;
  std::string scale = "desk";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> loss;
  std::optional<double> alpha, lr1, lr2;
  std::optional<std::size_t> batch_size, proj_dim, hidden, epochs, phase2_epochs, n_samples,
      sample_size;
  bool no_word_sampling = false;
};

void add_train_flags(CLI::App* app, TrainArgs& a) {
  app->add_option("--config", a.config, "JSON file with training settings")->check(CLI::ExistingFile);
  app->add_option("--scale", a.scale, "Base defaults before config and flags")
      ->check(CLI::IsMember({"desk", "full"}));
  app->add_option("--seed", a.seed, "Top-level seed");
  app->add_option("--loss", a.loss, "Loss kind")->check(CLI::IsMember({"nce", "shn", "mms", "amm"}));
  app->add_option("--alpha", a.alpha, "AMM dampening");
  app->add_option("--batch-size", a.batch_size, "Mini-batch size");
  app->add_option("--proj-dim", a.proj_dim, "Projection output width");
  app->add_option("--hidden", a.hidden, "Projection hidden width");
  app->add_option("--epochs", a.epochs, "Phase-one epochs");
  app->add_option("--phase2-epochs", a.phase2_epochs, "Phase-two epochs");
  app->add_option("--lr1", a.lr1, "Phase-one learning rate");
  app->add_option("--lr2", a.lr2, "Phase-two learning rate");
  app->add_flag("--no-word-sampling", a.no_word_sampling, "Pool every caption word");
  app->add_option("--n-samples", a.n_samples, "Evaluation samples");
  app->add_option("--sample-size", a.sample_size, "Pairs per evaluation sample");
}

amm::TrainConfig apply_overrides(amm::TrainConfig cfg, const TrainArgs& a) {
  if (a.seed) cfg.seed = *a.seed;
  if (a.loss) cfg.loss_kind = amm::parse_loss_kind(*a.loss);
  if (a.alpha) cfg.alpha = *a.alpha;
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  if (a.proj_dim) cfg.proj_dim = *a.proj_dim;
  if (a.hidden) cfg.hidden = *a.hidden;
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.phase2_epochs) cfg.phase2_epochs = *a.phase2_epochs;
  if (a.lr1) cfg.lr_phase1 = *a.lr1;
  if (a.lr2) cfg.lr_phase2 = *a.lr2;
  if (a.no_word_sampling) cfg.word_sampling = false;
  if (a.n_samples) cfg.n_samples = *a.n_samples;
  if (a.sample_size) cfg.sample_size = *a.sample_size;
  return cfg;
}

amm::TrainConfig resolve_config(const TrainArgs& a) {
  amm::TrainConfig cfg = a.scale == "full" ? amm::TrainConfig{} : amm::TrainConfig::desk_scale();
  if (!a.config.empty()) cfg = amm::config_from_json(load_json_file(a.config), cfg);
  cfg = apply_overrides(cfg, a);
  cfg.threads = threads_from_env();
  cfg.validate();
  return cfg;
}

int run_synth(const SynthArgs& a) {
  amm::SyntheticSpec spec;
  if (!a.config.empty()) spec = synth_spec_from_json(load_json_file(a.config), spec);
  if (a.n) spec.n_pairs = *a.n;
  if (a.d_latent) spec.d_latent = *a.d_latent;
  if (a.d_x) spec.d_x = *a.d_x;
  if (a.d_y) spec.d_y = *a.d_y;
  if (a.sigma) spec.noise_sigma = *a.sigma;
  if (a.seed) spec.seed = *a.seed;
  if (a.caption_words) spec.caption_words = *a.caption_words;
  if (a.identity_maps) spec.identity_maps = true;
  const auto data = amm::synth_generate(spec);
  const fs::path out(a.out);
  amm::store_save(data.x, out / "x.emb");
  amm::store_save(data.y, out / "y.emb");
  amm::manifest_save(data.manifest, out / "manifest.json");
  if (data.y_words) amm::store_save(*data.y_words, out / "y_words.emb");
  std::cout << "wrote " << data.x.size() << " pairs to " << out.string() << "\n";
  return kExitOk;
}

int run_train(const TrainArgs& a, const std::string& data_dir, const std::string& out_dir) {
  const auto cfg = resolve_config(a);
  const auto data = load_dataset(data_dir);
  const auto result = amm::run_two_phase(cfg, data);
  const fs::path out(out_dir);
  amm::checkpoint_save(amm::make_checkpoint(result.state, cfg), out / "checkpoint.ckp");
  write_json(out / "report.json", amm::report_to_json(result.test_report));
  std::vector<json> trace;
  for (const auto& rec : result.state.history) trace.push_back(amm::epoch_to_json(rec));
  write_jsonl(out / "trace.jsonl", trace);
  std::cout << "best epoch " << result.state.best_epoch << " eval mAP " << result.state.best_metric
            << "; test mean mAP " << result.test_report.mean.map.mean << " R@1 "
            << result.test_report.mean.r_at_1.mean << "\n";
  return kExitOk;
}

int run_eval(const TrainArgs& a, const std::string& checkpoint, const std::string& data_dir,
             const std::string& split, const std::string& out_dir) {
  const auto ckpt = amm::checkpoint_load(checkpoint);
  amm::TrainConfig cfg = amm::config_from_json(ckpt.config, amm::TrainConfig::desk_scale());
  cfg = apply_overrides(cfg, a);
  cfg.threads = threads_from_env();
  cfg.validate();
  const auto data = load_dataset(data_dir);
  const auto report = amm::evaluate_split(ckpt.x_head, ckpt.y_head, cfg, data, amm::parse_split(split));
  const json j = amm::report_to_json(report);
  if (!out_dir.empty()) write_json(fs::path(out_dir) / "report.json", j);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int run_qc(const std::string& input, const std::string& out_dir) {
  std::istringstream lines(amm::read_file(input));
  std::unordered_set<std::string> seen;
  std::vector<json> verdicts;
  std::size_t passed = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto rec = amm::parse_caption_record(line);
    const auto verdict = amm::validate_caption(rec, seen);
    if (verdict.pass()) ++passed;
    verdicts.push_back({{"id", rec.id}, {"verdict", std::string(amm::to_string(verdict.reason))}});
  }
  write_jsonl(fs::path(out_dir) / "verdicts.jsonl", verdicts);
  std::cout << passed << "/" << verdicts.size() << " captions passed\n";
  return kExitOk;
}

int run_ablate(const TrainArgs& a, const std::string& axis_name, const std::string& values_csv,
               const std::string& data_dir, const std::string& out_dir) {
  const auto cfg = resolve_config(a);
  const auto axis = amm::parse_ablation_axis(axis_name);
  const auto values = split_values(values_csv);
  const auto data = load_dataset(data_dir);
  const auto rows = amm::ablate(cfg, axis, values, data);
  std::vector<json> lines;
  for (const auto& row : rows) {
    lines.push_back(amm::ablation_row_to_json(axis, row));
    std::cout << amm::to_string(axis) << "=" << row.value << " test mean mAP "
              << row.report.mean.map.mean << "\n";
  }
  write_jsonl(fs::path(out_dir) / "ablation.jsonl", lines);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-modal embedding alignment with adaptive mean margin losses", "amm_align"};
  app.require_subcommand(1, 1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic paired dataset");
  synth_cmd->add_option("--config", synth.config, "JSON file with generator settings")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--n", synth.n, "Number of pairs");
  synth_cmd->add_option("--d-latent", synth.d_latent, "Latent width");
  synth_cmd->add_option("--d-x", synth.d_x, "Video feature width");
  synth_cmd->add_option("--d-y", synth.d_y, "Caption feature width");
  synth_cmd->add_option("--sigma", synth.sigma, "Observation noise");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--caption-words", synth.caption_words, "Mean word count per caption");
  synth_cmd->add_flag("--identity-maps", synth.identity_maps, "Use identity mixing maps");

  TrainArgs train;
  std::string train_data, train_out;
  auto* train_cmd = app.add_subcommand("train", "Train projection heads");
  add_train_flags(train_cmd, train);
  train_cmd->add_option("--data", train_data, "Dataset directory")->required();
  train_cmd->add_option("--out", train_out, "Output directory")->required();

  TrainArgs eval;
  std::string eval_ckpt, eval_data, eval_split = "test", eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval_cmd->add_option("--data", eval_data, "Dataset directory")->required();
  eval_cmd->add_option("--split", eval_split, "Split to evaluate")
      ->check(CLI::IsMember({"train", "eval", "test"}));
  eval_cmd->add_option("--out", eval_out, "Output directory");
  eval_cmd->add_option("--seed", eval.seed, "Evaluation seed");
  eval_cmd->add_option("--n-samples", eval.n_samples, "Evaluation samples");
  eval_cmd->add_option("--sample-size", eval.sample_size, "Pairs per evaluation sample");

  std::string qc_input, qc_out;
  auto* qc_cmd = app.add_subcommand("qc", "Run caption quality control");
  qc_cmd->add_option("--input", qc_input, "Caption records, one JSON object per line")->required();
  qc_cmd->add_option("--out", qc_out, "Output directory")->required();

  TrainArgs abl;
  std::string abl_axis, abl_values, abl_data, abl_out;
  auto* abl_cmd = app.add_subcommand("ablate", "Sweep one training setting");
  add_train_flags(abl_cmd, abl);
  abl_cmd->add_option("--axis", abl_axis, "alpha, batch_size, proj_dim, sampling or loss_kind")
      ->required();
  abl_cmd->add_option("--values", abl_values, "Comma-separated values")->required();
  abl_cmd->add_option("--data", abl_data, "Dataset directory")->required();
  abl_cmd->add_option("--out", abl_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*train_cmd) return run_train(train, train_data, train_out);
    if (*eval_cmd) return run_eval(eval, eval_ckpt, eval_data, eval_split, eval_out);
    if (*qc_cmd) return run_qc(qc_input, qc_out);
    if (*abl_cmd) return run_ablate(abl, abl_axis, abl_values, abl_data, abl_out);
  } catch (const amm::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const amm::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const amm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
