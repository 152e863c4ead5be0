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

#include "memsg/num/param_store.hpp"

#include <cmath>

#include "memsg/error.hpp"

namespace memsg::num {

const Tensor& ParamStore::add(std::string name, Tensor init, bool trainable) {
  if (index_.count(name)) throw DataError("duplicate parameter name '" + name + "'");
  init.node()->requires_grad = trainable;
  index_.emplace(name, params_.size());
  Parameter p;
  p.name = std::move(name);
  p.value = std::move(init);
  p.trainable = trainable;
  params_.push_back(std::move(p));
  return params_.back().value;
}

bool ParamStore::contains(std::string_view name) const {
  return index_.count(std::string(name)) > 0;
}

const Tensor& ParamStore::get(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw DataError("unknown parameter '" + std::string(name) + "'");
  return params_[it->second].value;
}

std::size_t ParamStore::set_trainable(std::string_view prefix, bool trainable) {
  std::size_t count = 0;
  for (auto& p : params_) {
    if (p.name.compare(0, prefix.size(), prefix) != 0) continue;
    p.trainable = trainable;
    p.value.node()->requires_grad = trainable;
    if (!trainable) p.value.zero_grad();
    ++count;
  }
  return count;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.value.zero_grad();
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

std::pair<std::size_t, std::size_t> ParamStore::locate(std::size_t flat_index) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const std::size_t n = params_[i].value.size();
    if (flat_index < n) return {i, flat_index};
    flat_index -= n;
  }
  throw DataError("flat parameter index out of range");
}

double ParamStore::flat_value(std::size_t index) const {
  auto [p, i] = locate(index);
  return params_[p].value.data()[i];
}

void ParamStore::set_flat_value(std::size_t index, double value) {
  auto [p, i] = locate(index);
  params_[p].value.mutable_data()[i] = value;
}

ParamStore ParamStore::clone() const {
  ParamStore out;
  for (const auto& p : params_) {
    out.add(p.name, p.value.detach(), p.trainable);
    auto& q = out.params_.back();
    q.first_moment = p.first_moment;
    q.second_moment = p.second_moment;
    q.step = p.step;
  }
  return out;
}

std::vector<std::string> ParamStore::copy_values_from(const ParamStore& source) {
  std::vector<std::string> missing;
  for (auto& p : params_) {
    auto it = source.index_.find(p.name);
    if (it == source.index_.end()) {
      missing.push_back(p.name);
      continue;
    }
    const Tensor& src = source.params_[it->second].value;
    if (src.shape() != p.value.shape()) {
      throw DataError("shape mismatch for parameter '" + p.name + "': " + to_string(src.shape()) +
                      " vs " + to_string(p.value.shape()));
    }
    std::copy(src.data().begin(), src.data().end(), p.value.mutable_data().begin());
  }
  return missing;
}

bool ParamStore::values_equal(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = other.params_[i];
    if (a.name != b.name || a.value.shape() != b.value.shape()) return false;
    if (!std::equal(a.value.data().begin(), a.value.data().end(), b.value.data().begin())) {
      return false;
    }
  }
  return true;
}

namespace init {

Tensor normal(Shape shape, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> data(numel(shape));
  for (double& v : data) v = dist(rng);
  return Tensor::from_data(std::move(shape), std::move(data));
}

Tensor glorot(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  return normal({fan_in, fan_out}, std::sqrt(2.0 / static_cast<double>(fan_in + fan_out)), rng);
}

Tensor constant(Shape shape, double value) {
  std::vector<double> data(numel(shape), value);
  return Tensor::from_data(std::move(shape), std::move(data));
}

}  // namespace init

void adam_step(ParamStore& store, const AdamConfig& config) {
  bool any = false;
  for (auto& p : store.parameters()) {
    if (!p.trainable || !p.value.has_grad()) continue;
    any = true;
    const std::size_t n = p.value.size();
    if (p.first_moment.size() != n) {
      p.first_moment.assign(n, 0.0);
      p.second_moment.assign(n, 0.0);
    }
    ++p.step;
    const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(p.step));
    const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(p.step));
    auto values = p.value.mutable_data();
    const auto grad = p.value.grad();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad[i];
      p.first_moment[i] = config.beta1 * p.first_moment[i] + (1.0 - config.beta1) * g;
      p.second_moment[i] = config.beta2 * p.second_moment[i] + (1.0 - config.beta2) * g * g;
      const double m_hat = p.first_moment[i] / correction1;
      const double v_hat = p.second_moment[i] / correction2;
      values[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
  if (!any) throw DataError("adam_step: no trainable parameter has a gradient");
}

}  // namespace memsg::num
