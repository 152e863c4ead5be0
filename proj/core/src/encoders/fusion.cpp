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

#include "memsg/encoders/fusion.hpp"

#include <algorithm>

#include "memsg/error.hpp"
#include "memsg/num/ops.hpp"

namespace memsg::encoders {

using num::Tensor;
namespace init = num::init;

MemoryFusion::MemoryFusion(num::ParamStore& store, const EncoderConfig& config,
                           std::mt19937_64& rng)
    : config_(config) {
  config_.validate();
  const std::size_t d = config_.hidden_dim;
  summary_query_ = store.add("fusion.summary_query", init::normal({1, d}, 1.0, rng));
  unknown_ = store.add("fusion.unknown", init::normal({1, d}, 1.0, rng));
  empty_memory_ = store.add("fusion.empty_memory", init::normal({1, d}, 1.0, rng));
  toi_embedding_ = store.add(
      "fusion.toi_embedding",
      init::normal({static_cast<std::size_t>(config_.max_toi_id) + 1, d}, 1.0, rng));
  for (std::size_t l = 0; l < config_.fusion_layers; ++l) {
    layers_.emplace_back(store, "fusion.layer" + std::to_string(l) + ".", d,
                         config_.ffn_multiplier, rng);
  }
  final_gain_ = store.add("fusion.final_ln.gain", init::constant({d}, 1.0));
  final_bias_ = store.add("fusion.final_ln.bias", init::constant({d}, 0.0));
}

FusionResult MemoryFusion::fuse(const Tensor& features,
                                std::span<const std::vector<FusionEntry>> windows, bool use_toi,
                                bool record_attention) const {
  const std::size_t batch = windows.size();
  if (batch == 0) throw ShapeError("MemoryFusion::fuse: empty batch");
  const int feature_rows = features.defined() ? static_cast<int>(features.rows()) : 0;

  // Sequence rows: per non-empty window, the summary token then its entries.
  // Source table rows: 0 summary, 1 unknown, 2.. features.
  std::vector<int> source_index;
  std::vector<int> toi_index;
  std::vector<int> summary_rows;
  std::vector<num::AttentionSegment> full_segments;
  std::vector<num::AttentionSegment> summary_segments;
  std::vector<int> rep_index(batch, 0);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto& entries = windows[b];
    if (entries.empty()) continue;
    const std::size_t begin = source_index.size();
    source_index.push_back(0);
    toi_index.push_back(-1);
    for (const auto& e : entries) {
      if (e.toi_id < 1) throw DataError("ToI ids must be positive, got " + std::to_string(e.toi_id));
      if (e.feature_row == FusionEntry::kUnknown) {
        source_index.push_back(1);
      } else if (e.feature_row < 0 || e.feature_row >= feature_rows) {
        throw ShapeError("MemoryFusion::fuse: feature row out of range");
      } else {
        source_index.push_back(2 + e.feature_row);
      }
      toi_index.push_back(std::min(e.toi_id, config_.max_toi_id));
    }
    const std::size_t end = source_index.size();
    rep_index[b] = static_cast<int>(summary_rows.size()) + 1;
    full_segments.push_back({begin, end, begin, end});
    summary_segments.push_back({summary_rows.size(), summary_rows.size() + 1, begin, end});
    summary_rows.push_back(static_cast<int>(begin));
  }

  FusionResult result;
  if (record_attention) result.attention.resize(batch);
  if (summary_rows.empty()) {
    result.memory_reps = num::embedding_lookup(empty_memory_, rep_index);
    return result;
  }

  std::vector<Tensor> table_parts{summary_query_, unknown_};
  if (features.defined()) table_parts.push_back(features);
  Tensor x = num::embedding_lookup(num::concat(table_parts, 0), source_index);
  if (use_toi) x = num::add(x, num::embedding_lookup(toi_embedding_, toi_index));

  std::vector<num::AttentionResult> per_layer(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const bool last = l + 1 == layers_.size();
    num::AttentionResult* sink = record_attention ? &per_layer[l] : nullptr;
    if (last) {
      x = layers_[l].forward(x, summary_segments, config_.fusion_heads, nullptr, summary_rows, sink);
    } else {
      x = layers_[l].forward(x, full_segments, config_.fusion_heads, nullptr, {}, sink);
    }
  }
  if (layers_.empty()) x = num::embedding_lookup(x, summary_rows);
  const Tensor summaries = num::layer_norm(x, final_gain_, final_bias_);
  const Tensor reps_table[] = {empty_memory_, summaries};
  result.memory_reps = num::embedding_lookup(num::concat(reps_table, 0), rep_index);

  if (record_attention) {
    std::size_t seg = 0;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t n_entries = windows[b].size();
      if (n_entries == 0) continue;
      auto& record = result.attention[b];
      record.weights.resize(layers_.size());
      for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& attn = per_layer[l];
        // Row of the summary query within this window's segment.
        const std::size_t query = 0;
        const std::size_t num_keys = n_entries + 1;
        record.weights[l].resize(config_.fusion_heads);
        for (std::size_t h = 0; h < config_.fusion_heads; ++h) {
          std::vector<double> w(n_entries);
          double total = 0.0;
          for (std::size_t j = 0; j < n_entries; ++j) {
            w[j] = attn.weight(seg, query, j + 1, h, num_keys);
            total += w[j];
          }
          for (double& v : w) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(n_entries);
          record.weights[l][h] = std::move(w);
        }
      }
      ++seg;
    }
  }
  return result;
}

}  // namespace memsg::encoders
