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

#include "memsg/encoders/graph_encoder.hpp"

#include <algorithm>
#include <unordered_map>

#include "memsg/error.hpp"
#include "memsg/num/ops.hpp"

namespace memsg::encoders {

using num::Tensor;
namespace init = num::init;

GraphEncoder::GraphEncoder(num::ParamStore& store, const EncoderConfig& config,
                           std::size_t num_entity_classes, std::size_t num_predicates,
                           std::mt19937_64& rng)
    : config_(config), num_entity_classes_(num_entity_classes), num_predicates_(num_predicates) {
  config_.validate();
  const std::size_t d = config_.hidden_dim;
  node_embedding_ = store.add("graph.node_embedding", init::normal({num_entity_classes, d}, 1.0, rng));
  edge_embedding_ = store.add("graph.edge_embedding", init::normal({num_predicates, d}, 1.0, rng));
  edge_out_state_ = store.add("graph.edge_out_state", init::normal({num_predicates, d}, 1.0, rng));
  edge_in_state_ = store.add("graph.edge_in_state", init::normal({num_predicates, d}, 1.0, rng));
  for (std::size_t l = 0; l < config_.graph_layers; ++l) {
    const std::string prefix = "graph.layer" + std::to_string(l) + ".";
    edge_to_bias_out_.push_back(
        store.add(prefix + "edge_bias_out", init::glorot(d, config_.graph_heads, rng)));
    edge_to_bias_in_.push_back(
        store.add(prefix + "edge_bias_in", init::glorot(d, config_.graph_heads, rng)));
    layers_.emplace_back(store, prefix, d, config_.ffn_multiplier, rng);
  }
  final_gain_ = store.add("graph.final_ln.gain", init::constant({d}, 1.0));
  final_bias_ = store.add("graph.final_ln.bias", init::constant({d}, 0.0));
}

Tensor GraphEncoder::encode(std::span<const sg::SceneGraph* const> graphs) const {
  if (graphs.empty()) throw ShapeError("GraphEncoder::encode: no graphs");
  const std::size_t d = config_.hidden_dim;

  std::vector<int> classes;
  std::vector<std::size_t> offsets{0};
  std::vector<num::AttentionSegment> segments;
  std::vector<int> bias_out_index;
  std::vector<int> bias_in_index;
  // Per node, counts of outgoing and incoming predicates.
  std::vector<double> out_counts;
  std::vector<double> in_counts;
  for (const sg::SceneGraph* graph : graphs) {
    const std::size_t begin = offsets.back();
    const std::size_t n = graph->entities.size();
    std::unordered_map<sg::EntityId, std::size_t> local;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = graph->entities[i];
      if (e.class_index < 0 || static_cast<std::size_t>(e.class_index) >= num_entity_classes_) {
        throw DataError("entity class index out of range for the graph encoder");
      }
      local[e.id] = i;
      classes.push_back(e.class_index);
    }
    // Cell (i, j): predicate on i->j and on j->i, -1 when absent.
    std::vector<int> out_edge(n * n, -1);
    for (const auto& r : graph->relations) {
      auto s = local.find(r.subject);
      auto o = local.find(r.object);
      if (s == local.end() || o == local.end()) {
        throw DataError("relation references an entity missing from the graph");
      }
      if (r.predicate < 0 || static_cast<std::size_t>(r.predicate) >= num_predicates_) {
        throw DataError("predicate index out of range for the graph encoder");
      }
      out_edge[s->second * n + o->second] = r.predicate;
    }
    out_counts.resize((begin + n) * num_predicates_, 0.0);
    in_counts.resize((begin + n) * num_predicates_, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const int p = out_edge[i * n + j];
        if (p < 0) continue;
        out_counts[(begin + i) * num_predicates_ + static_cast<std::size_t>(p)] += 1.0;
        in_counts[(begin + j) * num_predicates_ + static_cast<std::size_t>(p)] += 1.0;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        bias_out_index.push_back(out_edge[i * n + j]);
        bias_in_index.push_back(out_edge[j * n + i]);
      }
    }
    segments.push_back({begin, begin + n, begin, begin + n});
    offsets.push_back(begin + n);
  }
  if (classes.empty()) return Tensor::zeros({graphs.size(), d});

  const std::size_t nodes = classes.size();
  const Tensor out_incidence =
      Tensor::from_data({nodes, num_predicates_}, std::move(out_counts));
  const Tensor in_incidence = Tensor::from_data({nodes, num_predicates_}, std::move(in_counts));
  Tensor h = num::add(num::embedding_lookup(node_embedding_, classes),
                      num::add(num::matmul(out_incidence, edge_out_state_),
                               num::matmul(in_incidence, edge_in_state_)));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Tensor bias =
        num::add(num::embedding_lookup(num::matmul(edge_embedding_, edge_to_bias_out_[l]),
                                       bias_out_index),
                 num::embedding_lookup(num::matmul(edge_embedding_, edge_to_bias_in_[l]),
                                       bias_in_index));
    h = layers_[l].forward(h, segments, config_.graph_heads, &bias);
  }
  h = num::layer_norm(h, final_gain_, final_bias_);
  return num::segment_mean(h, offsets);
}

Tensor GraphEncoder::encode(const sg::SceneGraph& graph) const {
  const sg::SceneGraph* one[] = {&graph};
  return encode(one);
}

}  // namespace memsg::encoders
