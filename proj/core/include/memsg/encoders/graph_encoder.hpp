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
#include <random>
#include <span>
#include <vector>

#include "memsg/encoders/config.hpp"
#include "memsg/encoders/transformer_layer.hpp"
#include "memsg/num/param_store.hpp"
#include "memsg/sg/scene_graph.hpp"

namespace memsg::encoders {

// Scene graph -> [d] feature. Node states start from class embeddings plus
// embeddings of the predicates leaving and entering the node, then go
// through full node-to-node self-attention whose logit for (i, j) is biased
// by learned projections of the predicate embeddings on i->j and j->i. The
// graph feature is the mean over final node states; a graph without entities
// maps to the zero vector.
class GraphEncoder {
 public:
  GraphEncoder(num::ParamStore& store, const EncoderConfig& config,
               std::size_t num_entity_classes, std::size_t num_predicates, std::mt19937_64& rng);

  // [G, d], one row per graph. G must be positive.
  num::Tensor encode(std::span<const sg::SceneGraph* const> graphs) const;
  // [1, d]
  num::Tensor encode(const sg::SceneGraph& graph) const;

 private:
  EncoderConfig config_;
  std::size_t num_entity_classes_;
  std::size_t num_predicates_;
  num::Tensor node_embedding_;  // [entity classes, d]
  num::Tensor edge_embedding_;  // [predicates, d]
  num::Tensor edge_out_state_;  // [predicates, d]
  num::Tensor edge_in_state_;   // [predicates, d]
  std::vector<num::Tensor> edge_to_bias_out_;  // per layer [d, heads], edge i->j
  std::vector<num::Tensor> edge_to_bias_in_;   // per layer [d, heads], edge j->i
  std::vector<TransformerLayer> layers_;
  num::Tensor final_gain_, final_bias_;
};

}  // namespace memsg::encoders
