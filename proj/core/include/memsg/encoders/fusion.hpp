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

namespace memsg::encoders {

struct FusionEntry {
  // Row of the feature table, or kUnknown for the UNKNOWN token.
  int feature_row = 0;
  int toi_id = 1;

  static constexpr int kUnknown = -1;
};

// Summary-query attention over the memory entries, renormalized over entry
// positions: weights[layer][head][entry].
struct AttentionRecord {
  std::vector<std::vector<std::vector<double>>> weights;
};

struct FusionResult {
  num::Tensor memory_reps;  // [B, d]
  std::vector<AttentionRecord> attention;  // per window when recorded
};

// Summarizes a window of memory features into one memory representation via
// a learned summary token prepended to the sequence. Entries get the learned
// UNKNOWN vector when masked and, with use_toi, the ToI positional embedding.
// An empty window yields the learned empty-memory embedding.
class MemoryFusion {
 public:
  MemoryFusion(num::ParamStore& store, const EncoderConfig& config, std::mt19937_64& rng);

  // `features` is [F, d] (may be undefined when no entry references a row).
  FusionResult fuse(const num::Tensor& features,
                    std::span<const std::vector<FusionEntry>> windows, bool use_toi,
                    bool record_attention = false) const;

  std::size_t hidden_dim() const { return config_.hidden_dim; }
  const num::Tensor& empty_memory_embedding() const { return empty_memory_; }

 private:
  EncoderConfig config_;
  num::Tensor summary_query_;  // [1, d]
  num::Tensor unknown_;        // [1, d]
  num::Tensor empty_memory_;   // [1, d]
  num::Tensor toi_embedding_;  // [max_toi_id + 1, d]
  std::vector<TransformerLayer> layers_;
  num::Tensor final_gain_, final_bias_;
};

}  // namespace memsg::encoders
