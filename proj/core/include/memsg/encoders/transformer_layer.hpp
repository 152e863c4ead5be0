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
#include <string>
#include <vector>

#include "memsg/num/attention.hpp"
#include "memsg/num/param_store.hpp"

namespace memsg::encoders {

// Pre-norm transformer encoder layer: x + Attn(LN(x)), then + FFN(LN(.)).
class TransformerLayer {
 public:
  TransformerLayer(num::ParamStore& store, const std::string& prefix, std::size_t dim,
                   std::size_t ffn_multiplier, std::mt19937_64& rng);

  // With query_rows set, only those rows of x act as queries and only they
  // are returned, in the given order; segment q-ranges then index into
  // query_rows. Keys and values always span all rows of x.
  num::Tensor forward(const num::Tensor& x, std::span<const num::AttentionSegment> segments,
                      std::size_t heads, const num::Tensor* bias = nullptr,
                      std::span<const int> query_rows = {},
                      num::AttentionResult* attention = nullptr) const;

 private:
  num::Tensor ln1_gain_, ln1_bias_;
  num::Tensor wq_, wk_, wv_, wo_, bo_;
  num::Tensor ln2_gain_, ln2_bias_;
  num::Tensor w1_, b1_, w2_, b2_;
};

}  // namespace memsg::encoders
