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

#include "memsg/encoders/transformer_layer.hpp"

#include "memsg/encoders/config.hpp"
#include "memsg/error.hpp"
#include "memsg/num/ops.hpp"

namespace memsg::encoders {

using num::Tensor;
namespace init = num::init;

void EncoderConfig::validate() const {
  if (hidden_dim == 0 || graph_layers == 0 || fusion_layers == 0 || ffn_multiplier == 0) {
    throw DataError("encoder dimensions and layer counts must be positive");
  }
  if (graph_heads == 0 || hidden_dim % graph_heads != 0 || fusion_heads == 0 ||
      hidden_dim % fusion_heads != 0) {
    throw DataError("hidden_dim must be divisible by the attention head counts");
  }
  if (max_toi_id < 1) throw DataError("max_toi_id must be >= 1");
}

TransformerLayer::TransformerLayer(num::ParamStore& store, const std::string& prefix,
                                   std::size_t dim, std::size_t ffn_multiplier,
                                   std::mt19937_64& rng) {
  const std::size_t hidden = dim * ffn_multiplier;
  ln1_gain_ = store.add(prefix + "ln1.gain", init::constant({dim}, 1.0));
  ln1_bias_ = store.add(prefix + "ln1.bias", init::constant({dim}, 0.0));
  wq_ = store.add(prefix + "attn.wq", init::glorot(dim, dim, rng));
  wk_ = store.add(prefix + "attn.wk", init::glorot(dim, dim, rng));
  wv_ = store.add(prefix + "attn.wv", init::glorot(dim, dim, rng));
  wo_ = store.add(prefix + "attn.wo", init::glorot(dim, dim, rng));
  bo_ = store.add(prefix + "attn.bo", init::constant({dim}, 0.0));
  ln2_gain_ = store.add(prefix + "ln2.gain", init::constant({dim}, 1.0));
  ln2_bias_ = store.add(prefix + "ln2.bias", init::constant({dim}, 0.0));
  w1_ = store.add(prefix + "ffn.w1", init::glorot(dim, hidden, rng));
  b1_ = store.add(prefix + "ffn.b1", init::constant({hidden}, 0.0));
  w2_ = store.add(prefix + "ffn.w2", init::glorot(hidden, dim, rng));
  b2_ = store.add(prefix + "ffn.b2", init::constant({dim}, 0.0));
}

Tensor TransformerLayer::forward(const Tensor& x, std::span<const num::AttentionSegment> segments,
                                 std::size_t heads, const Tensor* bias,
                                 std::span<const int> query_rows,
                                 num::AttentionResult* attention) const {
  const Tensor normed = num::layer_norm(x, ln1_gain_, ln1_bias_);
  const bool subset = !query_rows.empty();
  const Tensor query_in = subset ? num::embedding_lookup(normed, query_rows) : normed;
  const Tensor residual = subset ? num::embedding_lookup(x, query_rows) : x;

  auto attn = num::segment_attention(num::matmul(query_in, wq_), num::matmul(normed, wk_),
                                     num::matmul(normed, wv_), segments, heads, bias);
  const Tensor h = num::add(residual, num::linear(attn.output, wo_, bo_));
  if (attention != nullptr) *attention = attn;

  const Tensor ffn = num::linear(
      num::gelu(num::linear(num::layer_norm(h, ln2_gain_, ln2_bias_), w1_, b1_)), w2_, b2_);
  return num::add(h, ffn);
}

}  // namespace memsg::encoders
