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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "memsg/sg/scene_graph.hpp"
#include "memsg/sg/vocabulary.hpp"

namespace memsg::sg {

using PairFeatures = std::map<EntityPair, std::vector<double>>;

struct Timepoint {
  int t = 0;
  SceneGraph graph;
  // Either empty (no visual features recorded) or keyed by every ordered pair
  // of the timepoint's entities.
  PairFeatures pair_features;

  bool operator==(const Timepoint&) const = default;
};

struct Recording {
  std::string take_id;
  std::vector<Timepoint> timepoints;

  bool operator==(const Recording&) const = default;

  std::size_t size() const { return timepoints.size(); }
  // Shared pair-feature dimension, 0 when the recording carries no features.
  std::size_t feature_dim() const;
  bool has_features() const;
  std::vector<SceneGraph> graphs() const;
};

void validate(const Recording& recording, const Vocabulary& vocab);

// One JSON object per line. Errors carry the 1-based line number.
Recording parse_recording(std::string_view text, const Vocabulary& vocab);
std::string serialize_recording(const Recording& recording, const Vocabulary& vocab,
                                bool include_features = true);

Recording load_recording(const std::filesystem::path& path, const Vocabulary& vocab);
void save_recording(const std::filesystem::path& path, const Recording& recording,
                    const Vocabulary& vocab, bool include_features = true);

}  // namespace memsg::sg
