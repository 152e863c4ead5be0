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

#include "memsg/model/model.hpp"

#include <map>

#include "json.hpp"
#include "memsg/encoders/lbt.hpp"
#include "memsg/error.hpp"
#include "memsg/num/checkpoint.hpp"
#include "memsg/num/ops.hpp"

namespace memsg::model {

using num::Tensor;
namespace init = num::init;

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kMemory:
      return "memory";
    case Variant::kVisualOnly:
      return "visual";
    case Variant::kLbt:
      return "lbt";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "memory") return Variant::kMemory;
  if (name == "visual" || name == "visual_only") return Variant::kVisualOnly;
  if (name == "lbt") return Variant::kLbt;
  throw DataError("unknown model variant '" + std::string(name) + "'");
}

std::string ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["encoder"] = {{"hidden_dim", encoder.hidden_dim},
                  {"graph_layers", encoder.graph_layers},
                  {"fusion_layers", encoder.fusion_layers},
                  {"graph_heads", encoder.graph_heads},
                  {"fusion_heads", encoder.fusion_heads},
                  {"ffn_multiplier", encoder.ffn_multiplier},
                  {"max_toi_id", encoder.max_toi_id}};
  j["feature_dim"] = feature_dim;
  j["num_entity_classes"] = num_entity_classes;
  j["num_predicates"] = num_predicates;
  j["none_index"] = none_index;
  j["variant"] = std::string(to_string(variant));
  j["use_toi"] = use_toi;
  j["init_seed"] = init_seed;
  j["memory"] = {{"mode", std::string(memory::to_string(memory.mode))},
                 {"stride", memory.stride},
                 {"long_anchor", std::string(memory::to_string(memory.anchor))}};
  return j.dump();
}

ModelConfig ModelConfig::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ModelConfig c;
    const auto& e = j.at("encoder");
    c.encoder.hidden_dim = e.at("hidden_dim").get<std::size_t>();
    c.encoder.graph_layers = e.at("graph_layers").get<std::size_t>();
    c.encoder.fusion_layers = e.at("fusion_layers").get<std::size_t>();
    c.encoder.graph_heads = e.at("graph_heads").get<std::size_t>();
    c.encoder.fusion_heads = e.at("fusion_heads").get<std::size_t>();
    c.encoder.ffn_multiplier = e.at("ffn_multiplier").get<std::size_t>();
    c.encoder.max_toi_id = e.at("max_toi_id").get<int>();
    c.feature_dim = j.at("feature_dim").get<std::size_t>();
    c.num_entity_classes = j.at("num_entity_classes").get<std::size_t>();
    c.num_predicates = j.at("num_predicates").get<std::size_t>();
    c.none_index = j.at("none_index").get<int>();
    c.variant = parse_variant(j.at("variant").get<std::string>());
    c.use_toi = j.at("use_toi").get<bool>();
    c.init_seed = j.at("init_seed").get<std::uint64_t>();
    if (j.contains("memory")) {
      const auto& m = j.at("memory");
      c.memory.mode = memory::parse_memory_mode(m.at("mode").get<std::string>());
      c.memory.stride = m.at("stride").get<int>();
      c.memory.anchor = memory::parse_long_anchor(m.at("long_anchor").get<std::string>());
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model config: ") + e.what());
  }
}

SceneGraphModel::SceneGraphModel(const ModelConfig& config) : config_(config) {
  config_.encoder.validate();
  if (config_.num_entity_classes == 0 || config_.num_predicates == 0 || config_.feature_dim == 0) {
    throw DataError("model needs non-empty vocabularies and a positive feature dimension");
  }
  std::mt19937_64 rng(config_.init_seed);
  const std::size_t d = config_.encoder.hidden_dim;
  const std::size_t p = config_.num_predicates;
  graph_encoder_ = std::make_unique<encoders::GraphEncoder>(
      store_, config_.encoder, config_.num_entity_classes, p, rng);
  fusion_ = std::make_unique<encoders::MemoryFusion>(store_, config_.encoder, rng);
  lbt_w_ = store_.add("lbt.w", init::glorot(config_.feature_dim, d, rng));
  lbt_b_ = store_.add("lbt.b", init::constant({d}, 0.0));
  visual_w_ = store_.add("visual.w", init::glorot(config_.feature_dim, d, rng));
  visual_b_ = store_.add("visual.b", init::constant({d}, 0.0));
  rel_w1_ = store_.add("relation_head.w1", init::glorot(2 * d, d, rng));
  rel_b1_ = store_.add("relation_head.b1", init::constant({d}, 0.0));
  rel_w2_ = store_.add("relation_head.w2", init::glorot(d, p, rng));
  rel_b2_ = store_.add("relation_head.b2", init::constant({p}, 0.0));
  act_w_ = store_.add("action_head.w", init::glorot(d, p + 1, rng));
  act_b_ = store_.add("action_head.b", init::constant({p + 1}, 0.0));
}

SceneGraphModel SceneGraphModel::load(const std::filesystem::path& path) {
  const auto ckpt = num::read_checkpoint(path);
  SceneGraphModel model(ModelConfig::from_json(ckpt.metadata));
  num::load_checkpoint(ckpt, model.store_);
  return model;
}

void SceneGraphModel::save(const std::filesystem::path& path) const {
  num::save_checkpoint(path, store_, config_.to_json());
}

Tensor SceneGraphModel::memory_features(std::span<const Sample> samples,
                                        std::vector<std::vector<encoders::FusionEntry>>& windows,
                                        EncodingCache* cache) const {
  windows.assign(samples.size(), {});
  if (config_.variant == Variant::kLbt) {
    std::map<std::pair<const sg::Recording*, int>, int> rows;
    std::vector<double> inputs;
    for (std::size_t b = 0; b < samples.size(); ++b) {
      for (const auto& entry : samples[b].window.entries) {
        int row = encoders::FusionEntry::kUnknown;
        if (!entry.is_unknown()) {
          const auto key = std::make_pair(samples[b].recording, entry.t);
          auto [it, inserted] = rows.emplace(key, static_cast<int>(rows.size()));
          if (inserted) {
            const auto mean = encoders::lbt_timepoint_feature(
                samples[b].recording->timepoints.at(entry.t).pair_features, config_.feature_dim);
            inputs.insert(inputs.end(), mean.begin(), mean.end());
          }
          row = it->second;
        }
        windows[b].push_back({row, entry.toi_id});
      }
    }
    if (rows.empty()) return {};
    const Tensor in = Tensor::from_data({rows.size(), config_.feature_dim}, std::move(inputs));
    return num::linear(in, lbt_w_, lbt_b_);
  }

  std::unordered_map<std::string, int> rows;
  std::vector<const sg::SceneGraph*> graphs;
  std::vector<std::string> keys;
  for (std::size_t b = 0; b < samples.size(); ++b) {
    for (const auto& entry : samples[b].window.entries) {
      int row = encoders::FusionEntry::kUnknown;
      if (!entry.is_unknown()) {
        std::string key = sg::canonical_key(*entry.graph);
        auto [it, inserted] = rows.emplace(key, static_cast<int>(graphs.size()));
        if (inserted) {
          graphs.push_back(&*entry.graph);
          keys.push_back(std::move(key));
        }
        row = it->second;
      }
      windows[b].push_back({row, entry.toi_id});
    }
  }
  if (graphs.empty()) return {};
  if (cache == nullptr) return graph_encoder_->encode(graphs);

  if (num::grad_enabled()) throw std::logic_error("EncodingCache requires grad mode off");
  std::vector<const sg::SceneGraph*> missing;
  std::vector<std::size_t> missing_rows;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (!cache->count(keys[i])) {
      missing.push_back(graphs[i]);
      missing_rows.push_back(i);
    }
  }
  if (!missing.empty()) {
    const Tensor encoded = graph_encoder_->encode(missing);
    const std::size_t d = config_.encoder.hidden_dim;
    for (std::size_t m = 0; m < missing.size(); ++m) {
      const auto row = encoded.data().subspan(m * d, d);
      (*cache)[keys[missing_rows[m]]] = std::vector<double>(row.begin(), row.end());
    }
  }
  std::vector<double> data;
  data.reserve(graphs.size() * config_.encoder.hidden_dim);
  for (const auto& key : keys) {
    const auto& v = cache->at(key);
    data.insert(data.end(), v.begin(), v.end());
  }
  return Tensor::from_data({graphs.size(), config_.encoder.hidden_dim}, std::move(data));
}

Tensor SceneGraphModel::memory_representations(
    std::span<const Sample> samples, bool record_attention,
    std::vector<encoders::AttentionRecord>* attention, EncodingCache* cache) const {
  const std::size_t d = config_.encoder.hidden_dim;
  if (config_.variant == Variant::kVisualOnly) {
    if (attention) attention->assign(samples.size(), {});
    return Tensor::zeros({samples.size(), d});
  }
  std::vector<std::vector<encoders::FusionEntry>> windows;
  const Tensor features = memory_features(samples, windows, cache);
  auto fused = fusion_->fuse(features, windows, config_.use_toi, record_attention);
  if (attention) *attention = std::move(fused.attention);
  return fused.memory_reps;
}

Tensor SceneGraphModel::relation_logits(const Tensor& pair_features,
                                        const Tensor& memory_rows) const {
  const Tensor visual = num::gelu(num::linear(pair_features, visual_w_, visual_b_));
  const Tensor joint[] = {visual, memory_rows};
  const Tensor hidden = num::gelu(num::linear(num::concat(joint, 1), rel_w1_, rel_b1_));
  return num::linear(hidden, rel_w2_, rel_b2_);
}

Tensor SceneGraphModel::action_logits(const Tensor& memory_reps) const {
  return num::linear(memory_reps, act_w_, act_b_);
}

ForwardOutput SceneGraphModel::forward(std::span<const Sample> samples, bool record_attention,
                                       EncodingCache* cache) const {
  ForwardOutput out;
  out.memory_reps =
      memory_representations(samples, record_attention, &out.attention, cache);

  std::vector<double> features;
  std::vector<int> owner;
  out.pair_offsets.push_back(0);
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const auto& tp = samples[b].recording->timepoints.at(samples[b].t);
    auto pairs = sg::ordered_pairs(tp.graph);
    for (const auto& pair : pairs) {
      auto it = tp.pair_features.find(pair);
      if (it == tp.pair_features.end() || it->second.size() != config_.feature_dim) {
        throw DataError("missing or mis-sized pair features at t=" + std::to_string(tp.t) +
                        " for pair " + std::to_string(pair.subject) + "-" +
                        std::to_string(pair.object));
      }
      features.insert(features.end(), it->second.begin(), it->second.end());
      owner.push_back(static_cast<int>(b));
    }
    out.pair_offsets.push_back(out.pair_offsets.back() + pairs.size());
    out.pairs.push_back(std::move(pairs));
  }
  if (!owner.empty()) {
    const Tensor feats = Tensor::from_data({owner.size(), config_.feature_dim}, std::move(features));
    out.relation_logits = relation_logits(feats, num::embedding_lookup(out.memory_reps, owner));
  }
  out.action_logits = action_logits(out.memory_reps);
  return out;
}

PairLogits SceneGraphModel::predict_timepoint(const sg::PairFeatures& pair_features,
                                              const Tensor& memory_rep) const {
  const std::size_t d = config_.encoder.hidden_dim;
  if (memory_rep.size() != d) {
    throw ShapeError("predict_timepoint: memory_rep has shape " + num::to_string(memory_rep.shape()) +
                     ", expected [1," + std::to_string(d) + "]");
  }
  PairLogits out;
  if (pair_features.empty()) return out;
  std::vector<double> features;
  for (const auto& [pair, values] : pair_features) {
    if (values.size() != config_.feature_dim) {
      throw ShapeError("predict_timepoint: pair feature dimension " +
                       std::to_string(values.size()) + " vs " +
                       std::to_string(config_.feature_dim));
    }
    out.pairs.push_back(pair);
    features.insert(features.end(), values.begin(), values.end());
  }
  const Tensor rep = config_.variant == Variant::kVisualOnly
                         ? Tensor::zeros({1, d})
                         : num::reshape(memory_rep, {1, d});
  const std::vector<int> owner(out.pairs.size(), 0);
  out.logits = relation_logits(
      Tensor::from_data({out.pairs.size(), config_.feature_dim}, std::move(features)),
      num::embedding_lookup(rep, owner));
  return out;
}

sg::SceneGraph assemble_graph(const PairLogits& logits, const std::vector<sg::Entity>& entities,
                              int none_index) {
  sg::SceneGraph graph;
  graph.entities = entities;
  if (logits.pairs.empty()) return graph;
  const std::size_t classes = logits.logits.cols();
  const auto data = logits.logits.data();
  for (std::size_t i = 0; i < logits.pairs.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (data[i * classes + c] > data[i * classes + best]) best = c;
    }
    if (static_cast<int>(best) == none_index) continue;
    graph.relations.push_back(
        {logits.pairs[i].subject, static_cast<int>(best), logits.pairs[i].object});
  }
  return graph;
}

Tensor multitask_loss(const Tensor& relation_logits, std::span<const int> relation_targets,
                      const Tensor& action_logits, std::span<const int> action_targets,
                      double lambda) {
  if (lambda < 0.0) throw DataError("multitask weight must be >= 0");
  Tensor loss;
  if (relation_logits.defined()) loss = num::cross_entropy(relation_logits, relation_targets);
  if (lambda > 0.0) {
    const Tensor action = num::scale(num::cross_entropy(action_logits, action_targets), lambda);
    loss = loss.defined() ? num::add(loss, action) : action;
  }
  return loss.defined() ? loss : Tensor::scalar(0.0);
}

std::vector<int> relation_targets(const sg::SceneGraph& graph,
                                  std::span<const sg::EntityPair> pairs, int none_index) {
  std::map<sg::EntityPair, int> lookup;
  for (const auto& r : graph.relations) lookup[{r.subject, r.object}] = r.predicate;
  std::vector<int> targets;
  targets.reserve(pairs.size());
  for (const auto& pair : pairs) {
    auto it = lookup.find(pair);
    targets.push_back(it == lookup.end() ? none_index : it->second);
  }
  return targets;
}

}  // namespace memsg::model
