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

namespace memsg::encoders {

struct EncoderConfig {
  std::size_t hidden_dim = 80;
  std::size_t graph_layers = 2;
  std::size_t fusion_layers = 2;
  std::size_t graph_heads = 1;
  std::size_t fusion_heads = 1;
  std::size_t ffn_multiplier = 4;
  // ToI ids at or above this share one overflow embedding row.
  int max_toi_id = 512;

  void validate() const;
};

}  // namespace memsg::encoders
