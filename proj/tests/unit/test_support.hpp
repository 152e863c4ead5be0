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

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "memsg/sg/recording.hpp"
#include "memsg/sg/scene_graph.hpp"
#include "memsg/sg/vocabulary.hpp"
#include "memsg/synth/generator.hpp"

namespace memsg::testing {

inline const sg::Vocabulary& vocab() {
  static const sg::Vocabulary v = sg::Vocabulary::default_vocabulary();
  return v;
}

inline int pred(const char* name) { return vocab().predicate(name); }
inline int cls(const char* name) { return vocab().entity_class(name); }

// Entities: 0 head_surgeon, 1 assistant, 2 patient, 3 operating_table.
inline sg::SceneGraph or_graph(std::vector<sg::Relation> relations = {}) {
  sg::SceneGraph g;
  g.entities = {{0, cls("head_surgeon")}, {1, cls("assistant")}, {2, cls("patient")},
                {3, cls("operating_table")}};
  g.relations = std::move(relations);
  return g;
}

// Short scenario for fast tests: every phase lasts `k` timepoints.
inline synth::PhaseModel short_scenario(int k = 6, std::size_t phases = 3) {
  auto m = synth::default_scenario();
  m.phases.resize(phases);
  m.phases.back().successors.clear();
  for (auto& p : m.phases) p.min_duration = p.max_duration = k;
  m.min_entities = 6;
  m.max_entities = 6;
  return m;
}

inline sg::Recording small_recording(std::uint64_t seed, int k = 6, std::size_t phases = 3) {
  return synth::generate_recording(short_scenario(k, phases), vocab(), seed, "take").recording;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("memsg_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace memsg::testing
