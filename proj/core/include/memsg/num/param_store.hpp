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
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "memsg/num/tensor.hpp"

namespace memsg::num {

struct Parameter {
  std::string name;
  Tensor value;
  bool trainable = true;
  // Adam state.
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step = 0;
};

// Named learnable tensors in registration order. Flat addressing walks the
// parameters in that order.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  const Tensor& add(std::string name, Tensor init, bool trainable = true);
  bool contains(std::string_view name) const;
  const Tensor& get(std::string_view name) const;

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }

  // Freezes or unfreezes every parameter whose name starts with prefix.
  // Returns the number affected.
  std::size_t set_trainable(std::string_view prefix, bool trainable);
  void zero_grad();

  std::size_t num_scalars() const;
  double flat_value(std::size_t index) const;
  void set_flat_value(std::size_t index, double value);

  // Deep copy of values and optimizer state.
  ParamStore clone() const;
  // Copies values of same-named parameters. Throws DataError on shape
  // mismatch; names absent from `source` are left untouched and returned.
  std::vector<std::string> copy_values_from(const ParamStore& source);
  bool values_equal(const ParamStore& other) const;

 private:
  std::pair<std::size_t, std::size_t> locate(std::size_t flat_index) const;

  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace init {
Tensor normal(Shape shape, double stddev, std::mt19937_64& rng);
// Glorot/Xavier normal for a [fan_in, fan_out] weight.
Tensor glorot(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);
Tensor constant(Shape shape, double value);
}  // namespace init

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam update on every trainable parameter that holds a
// gradient. Parameters without a gradient are skipped; throws DataError when
// no trainable parameter has one.
void adam_step(ParamStore& store, const AdamConfig& config);

}  // namespace memsg::num
