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

#include "memsg/encoders/fusion.hpp"
#include "memsg/memory/memory.hpp"
#include "memsg/model/model.hpp"
#include "memsg/sg/recording.hpp"

namespace memsg::model {

struct InferenceTrace {
  struct Step {
    int t = 0;
    std::vector<int> entry_t;
    std::vector<int> entry_toi;
    encoders::AttentionRecord attention;  // empty for the visual-only variant
  };
  std::vector<Step> steps;
  std::size_t fuse_calls = 0;
};

// Greedy autoregressive decoding. The window for t is built from the
// predictions for 0..t-1; ground-truth relations are stripped before the
// model sees the recording.
std::vector<sg::SceneGraph> infer_sequence(const sg::Recording& recording,
                                           const SceneGraphModel& model,
                                           const memory::MemoryConfig& memory,
                                           InferenceTrace* trace = nullptr);

// Inference with ground-truth memory windows (teacher forcing at test time).
std::vector<sg::SceneGraph> infer_teacher_forced(const sg::Recording& recording,
                                                 const SceneGraphModel& model,
                                                 const memory::MemoryConfig& memory);

}  // namespace memsg::model
