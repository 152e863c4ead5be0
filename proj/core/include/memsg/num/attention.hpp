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
#include <memory>
#include <span>
#include <vector>

#include "memsg/num/tensor.hpp"

namespace memsg::num {

// Queries [q_begin, q_end) attend to keys/values [k_begin, k_end).
struct AttentionSegment {
  std::size_t q_begin = 0;
  std::size_t q_end = 0;
  std::size_t k_begin = 0;
  std::size_t k_end = 0;

  std::size_t num_queries() const { return q_end - q_begin; }
  std::size_t num_keys() const { return k_end - k_begin; }
};

// Offsets of each segment's (query, key) cell block; last element is the total.
std::vector<std::size_t> attention_cell_offsets(std::span<const AttentionSegment> segments);

struct AttentionResult {
  Tensor output;  // [rows(Q), d]
  // Softmax weights laid out [cell, head], cell = offset[s] + i * num_keys + j.
  std::shared_ptr<const std::vector<double>> weights;
  std::vector<std::size_t> cell_offsets;
  std::size_t heads = 1;

  double weight(std::size_t segment, std::size_t query, std::size_t key, std::size_t head,
                std::size_t num_keys) const {
    return (*weights)[(cell_offsets[segment] + query * num_keys + key) * heads + head];
  }
};

// Block-sparse multi-head scaled dot-product attention. Q is [m, d], K and V
// are [n, d]; d must divide evenly by heads. `bias`, when given, is a
// [cells, heads] additive logit bias in the same layout as the weights.
AttentionResult segment_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                  std::span<const AttentionSegment> segments, std::size_t heads,
                                  const Tensor* bias = nullptr);

}  // namespace memsg::num
