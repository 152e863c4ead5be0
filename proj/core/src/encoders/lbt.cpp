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

#include "memsg/encoders/lbt.hpp"

#include "memsg/error.hpp"

namespace memsg::encoders {

std::vector<double> lbt_timepoint_feature(const sg::PairFeatures& pair_features, std::size_t dim) {
  std::vector<double> mean(dim, 0.0);
  if (pair_features.empty()) return mean;
  for (const auto& [pair, values] : pair_features) {
    if (values.size() != dim) {
      throw DataError("pair feature dimension " + std::to_string(values.size()) +
                      " does not match " + std::to_string(dim));
    }
    for (std::size_t i = 0; i < dim; ++i) mean[i] += values[i];
  }
  for (double& v : mean) v /= static_cast<double>(pair_features.size());
  return mean;
}

}  // namespace memsg::encoders
