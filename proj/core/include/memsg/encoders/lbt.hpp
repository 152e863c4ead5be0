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
#include <vector>

#include "memsg/sg/recording.hpp"

namespace memsg::encoders {

// Mean over all per-pair visual vectors of one timepoint; the zero vector of
// length `dim` when there are no pairs.
std::vector<double> lbt_timepoint_feature(const sg::PairFeatures& pair_features, std::size_t dim);

}  // namespace memsg::encoders
