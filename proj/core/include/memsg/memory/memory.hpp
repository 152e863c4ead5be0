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
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memsg/sg/scene_graph.hpp"

namespace memsg::memory {

enum class MemoryMode { kAll, kShort, kLong, kLongShort };

// Where the Long stride counts from. kToi selects T-S, T-2S, ...; kStart
// selects 0, S, 2S, ... below T.
enum class LongAnchor { kToi, kStart };

struct MemoryConfig {
  MemoryMode mode = MemoryMode::kLongShort;
  int stride = 5;
  LongAnchor anchor = LongAnchor::kToi;
};

std::string_view to_string(MemoryMode mode);
MemoryMode parse_memory_mode(std::string_view name);
std::string_view to_string(LongAnchor anchor);
LongAnchor parse_long_anchor(std::string_view name);

// Sorted, deduplicated timepoint indices in [0, T-1] that enter the window
// for timepoint of interest T.
std::vector<int> select_memory_indices(const MemoryConfig& config, int toi);

struct MemoryEntry {
  int t = 0;
  // Distance to the timepoint of interest, T - t. Always >= 1.
  int toi_id = 1;
  // nullopt is the UNKNOWN token.
  std::optional<sg::SceneGraph> graph;

  bool is_unknown() const { return !graph.has_value(); }
  bool operator==(const MemoryEntry&) const = default;
};

struct MemoryWindow {
  int toi = 0;
  std::vector<MemoryEntry> entries;

  bool operator==(const MemoryWindow&) const = default;
};

// graphs[t] is the graph at timepoint t. Throws DataError when a selected
// index is not covered.
MemoryWindow build_window(std::span<const sg::SceneGraph> graphs, const MemoryConfig& config,
                          int toi);
MemoryWindow build_window(const std::map<int, sg::SceneGraph>& graphs,
                          const MemoryConfig& config, int toi);

struct AugmentationConfig {
  double p_apply = 0.5;
  double short_fraction = 0.5;
  double long_fraction = 0.5;
  // Entries with toi_id <= boundary are short-term, the rest long-term.
  int boundary = 5;
  // Replace one contiguous block instead of a uniform subset.
  bool contiguous = false;

  void validate() const;
};

// With probability p_apply picks the short or the long segment with equal
// probability and replaces the configured fraction of its payloads with
// UNKNOWN. A non-integral target count is rounded stochastically, so the
// expected replaced fraction equals the configured one.
MemoryWindow augment_window(MemoryWindow window, const AugmentationConfig& config,
                            std::mt19937_64& rng);

}  // namespace memsg::memory
