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
#include <functional>
#include <string>

#include "memsg/num/param_store.hpp"
#include "memsg/num/tensor.hpp"

namespace memsg::num {

struct GradCheckOptions {
  double h = 1e-5;
  double tolerance = 1e-4;
  // Coordinates sampled per parameter tensor; 0 checks every coordinate.
  std::size_t coords_per_param = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  // max |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
  double max_rel_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool passed = true;
};

// Compares reverse-mode gradients of loss_fn against central differences on
// the trainable parameters of `store`. loss_fn must be deterministic and read
// parameter values from the store on every call.
GradCheckResult grad_check(const std::function<Tensor()>& loss_fn, ParamStore& store,
                           const GradCheckOptions& options = {});

}  // namespace memsg::num
