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

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "memsg/num/param_store.hpp"

namespace memsg::num {

// Binary layout, all integers little-endian:
//   "MEMSGCKP" | u32 version | u32 metadata_len | metadata bytes (JSON) |
//   u64 count | count x { u32 name_len | name | u32 rank | u64 dims[rank] |
//   f64 data[prod(dims)] }
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string metadata;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

// Writes to a temporary sibling and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const std::string& metadata);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Overwrites every store parameter from the checkpoint. Throws DataError on a
// missing name or a shape mismatch.
void load_checkpoint(const Checkpoint& checkpoint, ParamStore& store);

}  // namespace memsg::num
