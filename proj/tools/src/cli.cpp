// Copyright 2026 The memsg Authors
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

#include "memsg_cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "memsg/error.hpp"
#include "memsg/eval/ablation.hpp"
#include "memsg/eval/report.hpp"
#include "memsg/model/infer.hpp"
#include "memsg/model/train.hpp"
#include "memsg/sg/recording.hpp"
#include "memsg/synth/generator.hpp"
#include "memsg/util/hash.hpp"
#include "memsg_cli/run_manifest.hpp"

namespace memsg::cli {
namespace {

namespace fs = std::filesystem;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("memsg");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("MEMSG_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

fs::path manifest_path_for(const fs::path& artifact) {
  if (fs::is_directory(artifact)) return artifact / "run_manifest.json";
  fs::path p = artifact;
  p += ".manifest.json";
  return p;
}

// --vocab wins; otherwise a vocab.json next to the data; otherwise the
// built-in default.
sg::Vocabulary resolve_vocab(const std::string& flag, const fs::path& data) {
  if (!flag.empty()) return sg::Vocabulary::load(flag);
  for (const fs::path dir : {data, data.parent_path(), data.parent_path().parent_path()}) {
    if (!dir.empty() && fs::is_regular_file(dir / "vocab.json")) {
      return sg::Vocabulary::load(dir / "vocab.json");
    }
  }
  return sg::Vocabulary::default_vocabulary();
}

std::vector<sg::Recording> load_recordings(const fs::path& path, const sg::Vocabulary& vocab) {
  if (fs::is_directory(path)) return synth::load_split(path, vocab);
  return {sg::load_recording(path, vocab)};
}

std::set<int> parse_predicate_list(const std::string& csv, const sg::Vocabulary& vocab) {
  std::set<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(vocab.predicate(item));
  }
  return out;
}

struct MemoryFlags {
  std::string mode;
  int stride = 0;
  std::string anchor;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* stride_opt = nullptr;
  CLI::Option* anchor_opt = nullptr;

  void add(CLI::App* app) {
    mode_opt = app->add_option("--memory-mode", mode, "all|short|long|longshort");
    stride_opt = app->add_option("--stride", stride, "memory stride S")->check(CLI::PositiveNumber);
    anchor_opt = app->add_option("--long-anchor", anchor, "toi|start");
  }
  void apply(memory::MemoryConfig& cfg) const {
    if (mode_opt->count()) cfg.mode = memory::parse_memory_mode(mode);
    if (stride_opt->count()) cfg.stride = stride;
    if (anchor_opt->count()) cfg.anchor = memory::parse_long_anchor(anchor);
  }
};

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string scenario, out, vocab;
  std::uint64_t seed = 0;
  std::size_t train = 8, val = 1, test = 1;
};

int run_synth(const SynthArgs& a) {
  const auto vocab = a.vocab.empty() ? sg::Vocabulary::default_vocabulary()
                                     : sg::Vocabulary::load(a.vocab);
  const auto scenario =
      a.scenario.empty() ? synth::default_scenario() : synth::PhaseModel::load(a.scenario);
  nlohmann::ordered_json cfg;
  cfg["scenario"] = nlohmann::ordered_json::parse(scenario.to_json());
  cfg["train"] = a.train;
  cfg["val"] = a.val;
  cfg["test"] = a.test;
  RunManifest manifest("synth", cfg.dump());
  manifest.add_seed("seed", a.seed);
  if (!a.scenario.empty()) manifest.add_input(a.scenario);
  if (!a.vocab.empty()) manifest.add_input(a.vocab);
  const auto bench = synth::make_benchmark(scenario, vocab, a.train, a.val, a.test, a.seed, a.out);
  spdlog::info("wrote {} recordings to {}", bench.files.size(), a.out);
  for (const char* split : {"train", "val", "test"}) manifest.add_output(fs::path(a.out) / split);
  manifest.write(fs::path(a.out) / "run_manifest.json");
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data, vocab, out, config, variant, init_from;
  MemoryFlags memory;
  double aug_p = 0, aug_frac = 0, lambda = 0, lr = 0;
  int aug_boundary = 0, epochs = 0, patience = 0, hidden_dim = 0;
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
  bool no_toi = false, no_multitask = false, no_augmentation = false, frozen_visual = false;
  bool aug_contiguous = false;
  CLI::App* app = nullptr;
};

model::TrainConfig resolve_train_config(const TrainArgs& a) {
  model::TrainConfig cfg;
  if (!a.config.empty()) cfg = model::TrainConfig::from_json(util::read_file(a.config), cfg);
  auto given = [&](const char* name) { return a.app->count(name) > 0; };
  if (given("--variant")) cfg.variant = model::parse_variant(a.variant);
  a.memory.apply(cfg.memory);
  if (given("--aug-p")) cfg.augmentation.p_apply = a.aug_p;
  if (given("--aug-frac")) cfg.augmentation.short_fraction = cfg.augmentation.long_fraction = a.aug_frac;
  if (given("--aug-boundary")) cfg.augmentation.boundary = a.aug_boundary;
  if (given("--aug-contiguous")) cfg.augmentation.contiguous = true;
  if (given("--lambda")) cfg.lambda = a.lambda;
  if (given("--lr")) cfg.adam.lr = a.lr;
  if (given("--epochs")) cfg.epochs = a.epochs;
  if (given("--patience")) cfg.patience = a.patience;
  if (given("--batch-size")) cfg.batch_size = a.batch_size;
  if (given("--hidden-dim")) cfg.encoder.hidden_dim = static_cast<std::size_t>(a.hidden_dim);
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--no-toi")) cfg.use_toi = false;
  if (given("--no-multitask")) cfg.use_multitask = false;
  if (given("--no-augmentation")) cfg.use_augmentation = false;
  if (given("--frozen-visual")) cfg.end_to_end = false;
  if (given("--init-from")) cfg.init_from = a.init_from;
  cfg.validate();
  return cfg;
}

int run_train(const TrainArgs& a) {
  const auto cfg = resolve_train_config(a);
  const fs::path data(a.data);
  const auto vocab = resolve_vocab(a.vocab, data);
  std::vector<sg::Recording> train_set, val_set;
  if (fs::is_directory(data / "train")) {
    train_set = synth::load_split(data / "train", vocab);
    if (fs::is_directory(data / "val")) val_set = synth::load_split(data / "val", vocab);
  } else {
    train_set = load_recordings(data, vocab);
  }
  spdlog::info("training {} model on {} recordings ({} validation)",
               model::to_string(cfg.variant), train_set.size(), val_set.size());
  RunManifest manifest("train", cfg.to_json());
  manifest.add_seed("seed", cfg.seed);
  manifest.add_input(fs::is_directory(data / "train") ? data / "train" : data);
  if (!val_set.empty()) manifest.add_input(data / "val");
  if (!cfg.init_from.empty()) manifest.add_input(cfg.init_from);

  auto result = model::train(train_set, val_set, vocab, cfg);
  result.model.save(a.out);

  nlohmann::ordered_json log = nlohmann::ordered_json::array();
  for (const auto& e : result.log) {
    log.push_back({{"epoch", e.epoch},
                   {"steps", e.steps},
                   {"train_loss", e.train_loss},
                   {"val_macro_f1", e.val_macro_f1}});
  }
  fs::path log_path = a.out;
  log_path += ".log.json";
  util::write_file_atomic(log_path, log.dump(2) + "\n");
  spdlog::info("best epoch {} (validation macro-F1 {:.4f}); checkpoint {}", result.best_epoch,
               result.best_val_macro_f1, a.out);
  manifest.add_output(a.out);
  manifest.add_output(log_path);
  manifest.write(manifest_path_for(a.out));
  return kExitOk;
}

// ---------------------------------------------------------------- infer

struct InferArgs {
  std::string ckpt, data, vocab, out;
  MemoryFlags memory;
};

int run_infer(const InferArgs& a) {
  const auto model = model::SceneGraphModel::load(a.ckpt);
  fs::path data(a.data);
  if (fs::is_directory(data / "test")) data /= "test";
  const auto vocab = resolve_vocab(a.vocab, data);
  memory::MemoryConfig mem = model.config().memory;
  a.memory.apply(mem);
  nlohmann::ordered_json cfg;
  cfg["memory_mode"] = memory::to_string(mem.mode);
  cfg["stride"] = mem.stride;
  cfg["long_anchor"] = memory::to_string(mem.anchor);
  RunManifest manifest("infer", cfg.dump());
  manifest.add_input(a.ckpt);
  manifest.add_input(data);

  const auto recordings = load_recordings(data, vocab);
  const bool to_dir = fs::is_directory(data);
  for (const auto& rec : recordings) {
    sg::Recording pred{rec.take_id, {}};
    const auto graphs = model::infer_sequence(rec, model, mem);
    for (std::size_t t = 0; t < graphs.size(); ++t) {
      pred.timepoints.push_back({static_cast<int>(t), graphs[t], {}});
    }
    const fs::path target = to_dir ? fs::path(a.out) / (rec.take_id + ".jsonl") : fs::path(a.out);
    util::write_file_atomic(target, sg::serialize_recording(pred, vocab, false));
  }
  spdlog::info("wrote predictions for {} recording(s) to {}", recordings.size(), a.out);
  manifest.add_output(a.out);
  manifest.write(manifest_path_for(a.out));
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred, gt, vocab, exclude, out;
  bool include_none = false;
};

int run_eval(const EvalArgs& a) {
  fs::path gt_path(a.gt);
  if (fs::is_directory(gt_path / "test")) gt_path /= "test";
  const auto vocab = resolve_vocab(a.vocab, gt_path);
  const auto preds = load_recordings(a.pred, vocab);
  const auto gts = load_recordings(gt_path, vocab);
  if (preds.size() != gts.size()) {
    throw DataError("prediction and ground-truth recording counts differ: " +
                    std::to_string(preds.size()) + " vs " + std::to_string(gts.size()));
  }
  std::vector<std::vector<sg::SceneGraph>> p, g;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const auto& match = [&]() -> const sg::Recording& {
      for (const auto& r : preds) {
        if (r.take_id == gts[i].take_id) return r;
      }
      throw DataError("no prediction for take '" + gts[i].take_id + "'");
    }();
    p.push_back(match.graphs());
    g.push_back(gts[i].graphs());
  }
  eval::EvalOptions options;
  options.include_none = a.include_none;
  options.consistency_exclude = parse_predicate_list(a.exclude, vocab);
  auto report = eval::evaluate(p, g, vocab, options);
  nlohmann::ordered_json cfg;
  cfg["include_none"] = a.include_none;
  cfg["consistency_exclude"] = a.exclude;
  report.config_fingerprint = eval::fingerprint(cfg.dump());
  const std::string text = report.to_json(vocab);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    RunManifest manifest("eval", cfg.dump());
    manifest.add_input(a.pred);
    manifest.add_input(gt_path);
    util::write_file_atomic(a.out, text);
    manifest.add_output(a.out);
    manifest.write(manifest_path_for(a.out));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- ablate

struct AblateArgs {
  std::string config, out, data, vocab;
  std::vector<std::uint64_t> seeds;
};

int run_ablate(const AblateArgs& a) {
  auto spec = eval::GridSpec::parse(util::read_file(a.config));
  if (!a.seeds.empty()) spec.seeds = a.seeds;
  const fs::path data(a.data);
  const auto vocab = resolve_vocab(a.vocab, data);
  auto bench = synth::load_benchmark(data, vocab);
  RunManifest manifest("ablate", spec.to_json());
  for (auto s : spec.seeds) manifest.add_seed("seed_" + std::to_string(s), s);
  manifest.add_input(a.config);
  manifest.add_input(data / "train");
  manifest.add_input(data / "val");
  manifest.add_input(data / "test");

  eval::AblationRunner runner(std::move(bench.train), std::move(bench.val), std::move(bench.test),
                              vocab);
  spdlog::info("ablation grid: {} rows", spec.row_count());
  const auto rows = runner.run(spec, [](const eval::GridRow& r) {
    spdlog::info("{} {} {} seed {}: macro-F1 {:.4f} consistency {:.4f}",
                 model::to_string(r.variant), eval::to_string(r.technique),
                 memory::to_string(r.mode), r.seed, r.macro_f1, r.consistency);
  });
  const auto summary = eval::summarize(rows);
  const double gt = runner.gt_consistency();
  const fs::path out(a.out);
  fs::create_directories(out);
  util::write_file_atomic(out / "results.csv", eval::rows_csv(rows));
  util::write_file_atomic(out / "summary.csv", eval::summary_csv(summary));
  util::write_file_atomic(out / "results.json", eval::results_json(rows, summary, gt));
  const std::string table = eval::summary_table(summary, gt);
  util::write_file_atomic(out / "summary.txt", table);
  std::cout << table;
  for (const char* f : {"results.csv", "summary.csv", "results.json", "summary.txt"}) {
    manifest.add_output(out / f);
  }
  manifest.write(out / "run_manifest.json");
  return kExitOk;
}

// ---------------------------------------------------------------- attn-dump

struct AttnArgs {
  std::string ckpt, data, vocab, out;
  MemoryFlags memory;
};

int run_attn_dump(const AttnArgs& a) {
  const auto model = model::SceneGraphModel::load(a.ckpt);
  if (model.config().variant == model::Variant::kVisualOnly) {
    throw DataError("the visual-only model has no memory attention to dump");
  }
  fs::path data(a.data);
  const auto vocab = resolve_vocab(a.vocab, data);
  memory::MemoryConfig mem = model.config().memory;
  a.memory.apply(mem);
  nlohmann::ordered_json cfg;
  cfg["memory_mode"] = memory::to_string(mem.mode);
  cfg["stride"] = mem.stride;
  cfg["long_anchor"] = memory::to_string(mem.anchor);
  RunManifest manifest("attn-dump", cfg.dump());
  manifest.add_input(a.ckpt);
  manifest.add_input(data);

  nlohmann::ordered_json dump;
  dump["memory_mode"] = memory::to_string(mem.mode);
  dump["stride"] = mem.stride;
  dump["recordings"] = nlohmann::ordered_json::array();
  for (const auto& rec : load_recordings(data, vocab)) {
    model::InferenceTrace trace;
    model::infer_sequence(rec, model, mem, &trace);
    nlohmann::ordered_json r;
    r["take_id"] = rec.take_id;
    r["timepoints"] = nlohmann::ordered_json::array();
    for (const auto& step : trace.steps) {
      nlohmann::ordered_json s;
      s["T"] = step.t;
      s["layers"] = nlohmann::ordered_json::array();
      const auto& w = step.attention.weights;
      for (std::size_t l = 0; l < w.size(); ++l) {
        nlohmann::ordered_json layer;
        layer["layer"] = l;
        layer["heads"] = nlohmann::ordered_json::array();
        for (std::size_t h = 0; h < w[l].size(); ++h) {
          nlohmann::ordered_json entries = nlohmann::ordered_json::array();
          for (std::size_t e = 0; e < w[l][h].size(); ++e) {
            entries.push_back(
                {{"t", step.entry_t[e]}, {"toi_id", step.entry_toi[e]}, {"weight", w[l][h][e]}});
          }
          layer["heads"].push_back(std::move(entries));
        }
        s["layers"].push_back(std::move(layer));
      }
      r["timepoints"].push_back(std::move(s));
    }
    dump["recordings"].push_back(std::move(r));
  }
  util::write_file_atomic(a.out, dump.dump(1) + "\n");
  spdlog::info("wrote attention dump to {}", a.out);
  manifest.add_output(a.out);
  manifest.write(manifest_path_for(a.out));
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"memsg: temporal scene graph generation with scene-graph memory"};
  app.set_version_flag("--version", std::string(MEMSG_VERSION));
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic benchmark");
  synth_cmd->add_option("--scenario", synth_args.scenario, "scenario file (default built in)")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_args.out, "output directory")->required();
  synth_cmd->add_option("--seed", synth_args.seed, "master seed");
  synth_cmd->add_option("--vocab", synth_args.vocab, "vocabulary file")->check(CLI::ExistingFile);
  synth_cmd->add_option("--train", synth_args.train, "training recordings")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--val", synth_args.val, "validation recordings")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--test", synth_args.test, "test recordings")->check(CLI::PositiveNumber);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a model with teacher forcing");
  train_args.app = train_cmd;
  train_cmd->add_option("--data", train_args.data, "benchmark root or recording directory")
      ->required()
      ->check(CLI::ExistingPath);
  train_cmd->add_option("--vocab", train_args.vocab, "vocabulary file")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_args.out, "checkpoint path")->required();
  train_cmd->add_option("--config", train_args.config, "training config file")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--variant", train_args.variant, "memory|visual|lbt");
  train_args.memory.add(train_cmd);
  train_cmd->add_option("--aug-p", train_args.aug_p, "augmentation probability");
  train_cmd->add_option("--aug-frac", train_args.aug_frac, "fraction of a segment replaced");
  train_cmd->add_option("--aug-boundary", train_args.aug_boundary, "short/long boundary");
  train_cmd->add_flag("--aug-contiguous", train_args.aug_contiguous, "replace a contiguous block");
  train_cmd->add_option("--lambda", train_args.lambda, "multitask weight");
  train_cmd->add_option("--lr", train_args.lr, "learning rate");
  train_cmd->add_option("--epochs", train_args.epochs, "maximum epochs");
  train_cmd->add_option("--patience", train_args.patience, "early-stopping patience");
  train_cmd->add_option("--batch-size", train_args.batch_size, "timepoints per step");
  train_cmd->add_option("--hidden-dim", train_args.hidden_dim, "hidden dimension");
  train_cmd->add_option("--seed", train_args.seed, "seed for all randomness");
  train_cmd->add_option("--init-from", train_args.init_from, "initial checkpoint")
      ->check(CLI::ExistingFile);
  train_cmd->add_flag("--no-toi", train_args.no_toi, "disable ToI positional ids");
  train_cmd->add_flag("--no-multitask", train_args.no_multitask, "disable the action head loss");
  train_cmd->add_flag("--no-augmentation", train_args.no_augmentation, "disable UNKNOWN masking");
  train_cmd->add_flag("--frozen-visual", train_args.frozen_visual,
                      "freeze the visual projection (two-stage training)");

  InferArgs infer_args;
  auto* infer_cmd = app.add_subcommand("infer", "autoregressive inference");
  infer_cmd->add_option("--ckpt", infer_args.ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
  infer_cmd->add_option("--data", infer_args.data, "recording file, directory or benchmark root")
      ->required()
      ->check(CLI::ExistingPath);
  infer_cmd->add_option("--vocab", infer_args.vocab, "vocabulary file")->check(CLI::ExistingFile);
  infer_cmd->add_option("--out", infer_args.out, "prediction file or directory")->required();
  infer_args.memory.add(infer_cmd);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "macro F1 and consistency");
  eval_cmd->add_option("--pred", eval_args.pred, "predicted recordings")->required()->check(CLI::ExistingPath);
  eval_cmd->add_option("--gt", eval_args.gt, "ground-truth recordings")->required()->check(CLI::ExistingPath);
  eval_cmd->add_option("--vocab", eval_args.vocab, "vocabulary file")->check(CLI::ExistingFile);
  eval_cmd->add_flag("--include-none", eval_args.include_none, "include none in the macro average");
  eval_cmd->add_option("--consistency-exclude", eval_args.exclude,
                       "comma-separated predicates ignored by consistency");
  eval_cmd->add_option("--out", eval_args.out, "report file (default stdout)");

  AblateArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand("ablate", "run an ablation grid");
  ablate_cmd->add_option("--config", ablate_args.config, "grid config")->required()->check(CLI::ExistingFile);
  ablate_cmd->add_option("--out", ablate_args.out, "output directory")->required();
  ablate_cmd->add_option("--data", ablate_args.data, "benchmark root")->required()->check(CLI::ExistingDirectory);
  ablate_cmd->add_option("--vocab", ablate_args.vocab, "vocabulary file")->check(CLI::ExistingFile);
  ablate_cmd->add_option("--seed", ablate_args.seeds, "override the grid seeds");

  AttnArgs attn_args;
  auto* attn_cmd = app.add_subcommand("attn-dump", "dump memory attention during inference");
  attn_cmd->add_option("--ckpt", attn_args.ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
  attn_cmd->add_option("--data", attn_args.data, "recording file or directory")
      ->required()
      ->check(CLI::ExistingPath);
  attn_cmd->add_option("--vocab", attn_args.vocab, "vocabulary file")->check(CLI::ExistingFile);
  attn_cmd->add_option("--out", attn_args.out, "output file")->required();
  attn_args.memory.add(attn_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (!spdlog::get("memsg")) configure_logging();
  try {
    if (*synth_cmd) return run_synth(synth_args);
    if (*train_cmd) return run_train(train_args);
    if (*infer_cmd) return run_infer(infer_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*ablate_cmd) return run_ablate(ablate_args);
    if (*attn_cmd) return run_attn_dump(attn_args);
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace memsg::cli
