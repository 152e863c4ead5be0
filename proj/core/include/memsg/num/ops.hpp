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
#include <span>
#include <vector>

#include "memsg/num/tensor.hpp"

namespace memsg::num {

// All ops throw ShapeError with both shapes on mismatch. There is no implicit
// broadcasting; add_row is the one explicit row-broadcast.

Tensor matmul(const Tensor& a, const Tensor& b);  // [m,k] x [k,n]
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double factor);
Tensor add_row(const Tensor& x, const Tensor& row);  // [n,d] + [d]
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

Tensor relu(const Tensor& x);
Tensor gelu(const Tensor& x);  // exact erf form
Tensor softmax(const Tensor& x, std::size_t axis);
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-5);  // normalizes the last axis of [n,d]

// Gathers rows of a [V,d] table. Index -1 yields a zero row.
Tensor embedding_lookup(const Tensor& table, std::span<const int> indices);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
Tensor reshape(const Tensor& x, Shape shape);

Tensor mean(const Tensor& x, std::size_t axis);
Tensor sum(const Tensor& x);
// Row means over consecutive row ranges [offsets[g], offsets[g+1]). Empty
// ranges produce zero rows.
Tensor segment_mean(const Tensor& x, std::span<const std::size_t> offsets);

// Mean negative log-softmax over rows of [n,C] logits.
Tensor cross_entropy(const Tensor& logits, std::span<const int> targets);
Tensor cross_entropy(const Tensor& logits, int target);  // [C] logits

}  // namespace memsg::num
