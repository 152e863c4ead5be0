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

#include "memsg/model/train.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "memsg/error.hpp"
#include "memsg/eval/metrics.hpp"
#include "memsg/model/infer.hpp"
#include "memsg/num/ops.hpp"
#include "memsg/util/seed.hpp"

namespace memsg::model {
namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void TrainConfig::validate() const {
  if (lambda < 0.0) throw DataError("lambda must be >= 0");
  if (memory.stride < 1) throw DataError("stride must be >= 1");
  if (epochs < 1) throw DataError("epochs must be >= 1");
  if (patience < 1) throw DataError("patience must be >= 1");
  if (batch_size < 1) throw DataError("batch_size must be >= 1");
  if (!(adam.lr > 0.0)) throw DataError("learning rate must be > 0");
  augmentation.validate();
  encoder.validate();
}

std::string TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["variant"] = std::string(model::to_string(variant));
  j["memory_mode"] = std::string(memory::to_string(memory.mode));
  j["stride"] = memory.stride;
  j["long_anchor"] = std::string(memory::to_string(memory.anchor));
  j["aug_p"] = augmentation.p_apply;
  j["aug_short_fraction"] = augmentation.short_fraction;
  j["aug_long_fraction"] = augmentation.long_fraction;
  j["aug_boundary"] = augmentation.boundary;
  j["aug_contiguous"] = augmentation.contiguous;
  j["hidden_dim"] = encoder.hidden_dim;
  j["graph_layers"] = encoder.graph_layers;
  j["fusion_layers"] = encoder.fusion_layers;
  j["graph_heads"] = encoder.graph_heads;
  j["fusion_heads"] = encoder.fusion_heads;
  j["ffn_multiplier"] = encoder.ffn_multiplier;
  j["max_toi_id"] = encoder.max_toi_id;
  j["lr"] = adam.lr;
  j["beta1"] = adam.beta1;
  j["beta2"] = adam.beta2;
  j["eps"] = adam.eps;
  j["use_toi"] = use_toi;
  j["use_multitask"] = use_multitask;
  j["use_augmentation"] = use_augmentation;
  j["end_to_end"] = end_to_end;
  j["lambda"] = lambda;
  j["epochs"] = epochs;
  j["patience"] = patience;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["init_from"] = init_from;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(std::string_view text, const TrainConfig& base) {
  TrainConfig c = base;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw DataError("training config must be an object");
    if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
    if (j.contains("memory_mode")) {
      c.memory.mode = memory::parse_memory_mode(j.at("memory_mode").get<std::string>());
    }
    read_if(j, "stride", c.memory.stride);
    if (j.contains("long_anchor")) {
      c.memory.anchor = memory::parse_long_anchor(j.at("long_anchor").get<std::string>());
    }
    read_if(j, "aug_p", c.augmentation.p_apply);
    if (j.contains("aug_frac")) {
      c.augmentation.short_fraction = c.augmentation.long_fraction = j.at("aug_frac").get<double>();
    }
    read_if(j, "aug_short_fraction", c.augmentation.short_fraction);
    read_if(j, "aug_long_fraction", c.augmentation.long_fraction);
    read_if(j, "aug_boundary", c.augmentation.boundary);
    read_if(j, "aug_contiguous", c.augmentation.contiguous);
    read_if(j, "hidden_dim", c.encoder.hidden_dim);
    read_if(j, "graph_layers", c.encoder.graph_layers);
    read_if(j, "fusion_layers", c.encoder.fusion_layers);
    read_if(j, "graph_heads", c.encoder.graph_heads);
    read_if(j, "fusion_heads", c.encoder.fusion_heads);
    read_if(j, "ffn_multiplier", c.encoder.ffn_multiplier);
    read_if(j, "max_toi_id", c.encoder.max_toi_id);
    read_if(j, "lr", c.adam.lr);
    read_if(j, "beta1", c.adam.beta1);
    read_if(j, "beta2", c.adam.beta2);
    read_if(j, "eps", c.adam.eps);
    read_if(j, "use_toi", c.use_toi);
    read_if(j, "use_multitask", c.use_multitask);
    read_if(j, "use_augmentation", c.use_augmentation);
    read_if(j, "end_to_end", c.end_to_end);
    read_if(j, "lambda", c.lambda);
    read_if(j, "epochs", c.epochs);
    read_if(j, "patience", c.patience);
    read_if(j, "batch_size", c.batch_size);
    read_if(j, "seed", c.seed);
    read_if(j, "init_from", c.init_from);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed training config: ") + e.what());
  }
  return c;
}

TrainConfig TrainConfig::from_json(std::string_view text) {
  return from_json(text, TrainConfig{});
}

num::Tensor batch_loss(const SceneGraphModel& model, std::span<const Sample> samples,
                       const sg::Vocabulary& vocab, double lambda) {
  const ForwardOutput out = model.forward(samples);
  std::vector<int> rel_targets;
  std::vector<int> act_targets;
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const auto& gt = samples[b].recording->timepoints.at(samples[b].t).graph;
    const auto targets = relation_targets(gt, out.pairs[b], vocab.none_index());
    rel_targets.insert(rel_targets.end(), targets.begin(), targets.end());
    act_targets.push_back(sg::main_action_class(sg::main_action(gt, vocab), vocab));
  }
  return multitask_loss(out.relation_logits, rel_targets, out.action_logits, act_targets, lambda);
}

double evaluate_macro_f1(std::span<const sg::Recording> recordings, const SceneGraphModel& model,
                         const memory::MemoryConfig& memory, const sg::Vocabulary& vocab) {
  std::vector<std::vector<sg::SceneGraph>> preds, gts;
  for (const auto& rec : recordings) {
    preds.push_back(infer_sequence(rec, model, memory));
    gts.push_back(rec.graphs());
  }
  return eval::macro_f1(preds, gts, vocab).macro_f1;
}

TrainResult train(std::span<const sg::Recording> train_set, std::span<const sg::Recording> val_set,
                  const sg::Vocabulary& vocab, const TrainConfig& cfg,
                  const SceneGraphModel* init, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw DataError("training set is empty");
  for (const auto& rec : train_set) {
    if (!rec.has_features()) throw DataError("recording '" + rec.take_id + "' has no pair features");
  }
  const std::size_t feature_dim = train_set.front().feature_dim();

  ModelConfig mc;
  mc.encoder = cfg.encoder;
  mc.feature_dim = feature_dim;
  mc.num_entity_classes = vocab.num_entity_classes();
  mc.num_predicates = vocab.num_predicates();
  mc.none_index = vocab.none_index();
  mc.variant = cfg.variant;
  mc.use_toi = cfg.use_toi;
  mc.init_seed = util::derive_seed(cfg.seed, "init");
  mc.memory = cfg.memory;
  TrainResult result{SceneGraphModel(mc), {}, 0, -1.0};
  SceneGraphModel& model = result.model;

  std::optional<SceneGraphModel> loaded;
  if (init == nullptr && !cfg.init_from.empty()) {
    loaded.emplace(SceneGraphModel::load(cfg.init_from));
    init = &*loaded;
  }
  if (init != nullptr) {
    const auto missing = model.params().copy_values_from(init->params());
    spdlog::debug("initialised {} parameters from source model ({} not present)",
                  model.params().parameters().size() - missing.size(), missing.size());
  }
  if (!cfg.end_to_end) model.params().set_trainable(SceneGraphModel::kVisualPrefix, false);

  const bool uses_memory = cfg.variant != Variant::kVisualOnly;
  // The action head reads only the memory representation, which is zero for
  // the visual-only variant.
  const double lambda = (cfg.use_multitask && uses_memory) ? cfg.lambda : 0.0;

  std::vector<std::vector<sg::SceneGraph>> gt_graphs;
  for (const auto& rec : train_set) gt_graphs.push_back(rec.graphs());

  std::mt19937_64 rng(util::derive_seed(cfg.seed, "train"));
  num::ParamStore best = model.params().clone();
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    // Runs of batch_size consecutive timepoints with a random phase offset.
    std::vector<std::pair<std::size_t, int>> runs;
    for (std::size_t r = 0; r < train_set.size(); ++r) {
      const int n = static_cast<int>(train_set[r].size());
      const int b = static_cast<int>(cfg.batch_size);
      const int offset = static_cast<int>(rng() % static_cast<std::uint64_t>(b));
      if (offset > 0) runs.emplace_back(r, offset - b);
      for (int start = offset; start < n; start += b) runs.emplace_back(r, start);
    }
    std::shuffle(runs.begin(), runs.end(), rng);

    double loss_total = 0.0;
    std::size_t steps = 0;
    for (const auto& [r, start] : runs) {
      const int b = static_cast<int>(cfg.batch_size);
      const int n = static_cast<int>(train_set[r].size());
      std::vector<Sample> samples;
      for (int t = std::max(0, start); t < std::min(n, start + b); ++t) {
        Sample s{&train_set[r], t, {}};
        if (uses_memory) {
          s.window = memory::build_window(std::span<const sg::SceneGraph>(gt_graphs[r]), cfg.memory, t);
          if (cfg.use_augmentation) {
            s.window = memory::augment_window(std::move(s.window), cfg.augmentation, rng);
          }
        }
        samples.push_back(std::move(s));
      }
      if (samples.empty()) continue;
      model.params().zero_grad();
      const num::Tensor loss = batch_loss(model, samples, vocab, lambda);
      if (!loss.requires_grad()) continue;
      num::backward(loss);
      num::adam_step(model.params(), cfg.adam);
      loss_total += loss.item();
      ++steps;
    }
    model.params().zero_grad();

    EpochLog log;
    log.epoch = epoch;
    log.steps = steps;
    log.train_loss = steps ? loss_total / static_cast<double>(steps) : 0.0;
    bool improved = true;
    if (!val_set.empty()) {
      log.val_macro_f1 = evaluate_macro_f1(val_set, model, cfg.memory, vocab);
      improved = log.val_macro_f1 > result.best_val_macro_f1;
    }
    log.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    spdlog::info("epoch {} loss {:.4f} val macro-F1 {:.4f} ({:.1f}s)", epoch, log.train_loss,
                 log.val_macro_f1, log.seconds);
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);

    if (improved) {
      result.best_epoch = epoch;
      result.best_val_macro_f1 = log.val_macro_f1;
      best = model.params().clone();
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  model.params().copy_values_from(best);
  return result;
}

}  // namespace memsg::model
