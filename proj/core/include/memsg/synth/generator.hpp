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
#include <filesystem>
#include <string>
#include <vector>

#include "memsg/sg/recording.hpp"
#include "memsg/sg/vocabulary.hpp"
#include "memsg/synth/phase_model.hpp"

namespace memsg::synth {

struct PhaseSegment {
  std::size_t phase = 0;  // index into PhaseModel::phases
  int start = 0;
  int length = 0;
};

struct GeneratedRecording {
  sg::Recording recording;
  std::vector<PhaseSegment> segments;
};

GeneratedRecording generate_recording(const PhaseModel& model, const sg::Vocabulary& vocab,
                                      std::uint64_t seed, const std::string& take_id);

struct BenchmarkFile {
  std::string split;
  std::string path;  // relative to the benchmark root
  std::string take_id;
  std::uint64_t seed = 0;
  std::string sha256;
};

struct BenchmarkManifest {
  std::uint64_t master_seed = 0;
  std::vector<BenchmarkFile> files;

  std::string to_json() const;
};

// Writes train/, val/, test/ recording files plus vocab.json, scenario.json
// and manifest.json under `root`.
BenchmarkManifest make_benchmark(const PhaseModel& model, const sg::Vocabulary& vocab,
                                 std::size_t n_train, std::size_t n_val, std::size_t n_test,
                                 std::uint64_t seed, const std::filesystem::path& root);

struct Benchmark {
  std::vector<sg::Recording> train, val, test;
};

// Loads every *.jsonl file of a directory in name order.
std::vector<sg::Recording> load_split(const std::filesystem::path& dir, const sg::Vocabulary& vocab);
Benchmark load_benchmark(const std::filesystem::path& root, const sg::Vocabulary& vocab);

}  // namespace memsg::synth
