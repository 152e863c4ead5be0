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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "memsg/encoders/config.hpp"
#include "memsg/encoders/fusion.hpp"
#include "memsg/encoders/graph_encoder.hpp"
#include "memsg/memory/memory.hpp"
#include "memsg/num/param_store.hpp"
#include "memsg/sg/recording.hpp"

namespace memsg::model {

enum class Variant {
  kMemory,      // scene-graph memory + visual features
  kVisualOnly,  // zero memory representation
  kLbt,         // memory built from mean pair features of prior timepoints
};

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view name);

struct ModelConfig {
  encoders::EncoderConfig encoder;
  std::size_t feature_dim = 16;
  std::size_t num_entity_classes = 0;
  std::size_t num_predicates = 0;
  int none_index = 0;
  Variant variant = Variant::kMemory;
  bool use_toi = true;
  std::uint64_t init_seed = 0;
  // Window selection the model was trained with; the inference default.
  memory::MemoryConfig memory;

  std::string to_json() const;
  static ModelConfig from_json(std::string_view text);
};

// One timepoint to predict. The current timepoint contributes only its entity
// list and pair features; relations are never read.
struct Sample {
  const sg::Recording* recording = nullptr;
  int t = 0;
  memory::MemoryWindow window;
};

// Per-graph encodings keyed by canonical graph key. Only valid while
// parameters are fixed and grad mode is off.
using EncodingCache = std::unordered_map<std::string, std::vector<double>>;

struct ForwardOutput {
  num::Tensor relation_logits;            // [pairs, P]; undefined without pairs
  std::vector<std::size_t> pair_offsets;  // B + 1 entries
  std::vector<std::vector<sg::EntityPair>> pairs;
  num::Tensor action_logits;  // [B, P + 1]
  num::Tensor memory_reps;    // [B, d]
  std::vector<encoders::AttentionRecord> attention;
};

struct PairLogits {
  std::vector<sg::EntityPair> pairs;
  num::Tensor logits;  // [pairs, P]; undefined when there are no pairs
};

class SceneGraphModel {
 public:
  explicit SceneGraphModel(const ModelConfig& config);

  static SceneGraphModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const ModelConfig& config() const { return config_; }
  num::ParamStore& params() { return store_; }
  const num::ParamStore& params() const { return store_; }

  ForwardOutput forward(std::span<const Sample> samples, bool record_attention = false,
                        EncodingCache* cache = nullptr) const;

  // [B, d] memory representations; zeros for the visual-only variant.
  num::Tensor memory_representations(std::span<const Sample> samples, bool record_attention,
                                     std::vector<encoders::AttentionRecord>* attention,
                                     EncodingCache* cache) const;

  // Bimodal relation head on [n, D_v] pair features and [n, d] memory rows.
  num::Tensor relation_logits(const num::Tensor& pair_features,
                              const num::Tensor& memory_rows) const;
  num::Tensor action_logits(const num::Tensor& memory_reps) const;

  // Single-timepoint convenience: logits for every ordered pair in
  // pair_features given one [1, d] memory representation.
  PairLogits predict_timepoint(const sg::PairFeatures& pair_features,
                               const num::Tensor& memory_rep) const;

  const encoders::GraphEncoder& graph_encoder() const { return *graph_encoder_; }
  const encoders::MemoryFusion& fusion() const { return *fusion_; }

  static constexpr std::string_view kVisualPrefix = "visual.";

 private:
  num::Tensor memory_features(std::span<const Sample> samples,
                              std::vector<std::vector<encoders::FusionEntry>>& windows,
                              EncodingCache* cache) const;

  ModelConfig config_;
  num::ParamStore store_;
  std::unique_ptr<encoders::GraphEncoder> graph_encoder_;
  std::unique_ptr<encoders::MemoryFusion> fusion_;
  num::Tensor lbt_w_, lbt_b_;
  num::Tensor visual_w_, visual_b_;
  num::Tensor rel_w1_, rel_b1_, rel_w2_, rel_b2_;
  num::Tensor act_w_, act_b_;
};

// Per ordered pair argmax; ties go to the lowest predicate index and argmax
// none produces no relation.
sg::SceneGraph assemble_graph(const PairLogits& logits, const std::vector<sg::Entity>& entities,
                              int none_index);

// mean pair cross-entropy + lambda * mean action cross-entropy. lambda == 0
// skips the action term.
num::Tensor multitask_loss(const num::Tensor& relation_logits,
                           std::span<const int> relation_targets,
                           const num::Tensor& action_logits, std::span<const int> action_targets,
                           double lambda);

// Per-pair targets (none for unrelated pairs) in ordered_pairs order.
std::vector<int> relation_targets(const sg::SceneGraph& graph,
                                  std::span<const sg::EntityPair> pairs, int none_index);

}  // namespace memsg::model
