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

#include "memsg/num/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace memsg::num {

GradCheckResult grad_check(const std::function<Tensor()>& loss_fn, ParamStore& store,
                           const GradCheckOptions& options) {
  store.zero_grad();
  backward(loss_fn());

  GradCheckResult result;
  std::mt19937_64 rng(options.seed);
  for (auto& p : store.parameters()) {
    if (!p.trainable) continue;
    const std::size_t n = p.value.size();
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), 0);
    if (options.coords_per_param > 0 && options.coords_per_param < n) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.coords_per_param);
      std::sort(coords.begin(), coords.end());
    }
    const std::vector<double> analytic_grad =
        p.value.has_grad() ? std::vector<double>(p.value.grad().begin(), p.value.grad().end())
                           : std::vector<double>(n, 0.0);
    auto values = p.value.mutable_data();
    for (std::size_t i : coords) {
      const double saved = values[i];
      double plus = 0.0;
      double minus = 0.0;
      {
        NoGradGuard no_grad;
        values[i] = saved + options.h;
        plus = loss_fn().item();
        values[i] = saved - options.h;
        minus = loss_fn().item();
      }
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.h);
      const double analytic = analytic_grad[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      ++result.coordinates_checked;
      if (result.coordinates_checked == 1 || rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_parameter = p.name;
        result.worst_index = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  result.passed = result.max_rel_error < options.tolerance;
  store.zero_grad();
  return result;
}

}  // namespace memsg::num
