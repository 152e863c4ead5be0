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

#include "memsg/model/infer.hpp"

#include "memsg/num/tensor.hpp"

namespace memsg::model {
namespace {

sg::Recording strip_relations(const sg::Recording& recording) {
  sg::Recording visible;
  visible.take_id = recording.take_id;
  visible.timepoints.reserve(recording.timepoints.size());
  for (const auto& tp : recording.timepoints) {
    visible.timepoints.push_back({tp.t, {tp.graph.entities, {}}, tp.pair_features});
  }
  return visible;
}

sg::SceneGraph decode(const ForwardOutput& out, const sg::SceneGraph& entities_only,
                      int none_index) {
  PairLogits logits{out.pairs.front(), out.relation_logits};
  return assemble_graph(logits, entities_only.entities, none_index);
}

std::vector<sg::SceneGraph> run(const sg::Recording& recording, const SceneGraphModel& model,
                                const memory::MemoryConfig& memory,
                                const std::vector<sg::SceneGraph>* memory_graphs,
                                InferenceTrace* trace) {
  num::NoGradGuard no_grad;
  const sg::Recording visible = strip_relations(recording);
  const bool uses_memory = model.config().variant != Variant::kVisualOnly;
  const int none = model.config().none_index;
  EncodingCache cache;
  std::vector<sg::SceneGraph> predictions;
  predictions.reserve(visible.timepoints.size());
  for (std::size_t i = 0; i < visible.timepoints.size(); ++i) {
    const int t = static_cast<int>(i);
    Sample sample{&visible, t, {}};
    if (uses_memory) {
      const auto& source = memory_graphs ? *memory_graphs : predictions;
      sample.window = memory::build_window(
          std::span<const sg::SceneGraph>(source.data(), static_cast<std::size_t>(t)), memory, t);
    }
    const ForwardOutput out = model.forward({&sample, 1}, trace != nullptr, &cache);
    if (trace) {
      InferenceTrace::Step step;
      step.t = t;
      for (const auto& e : sample.window.entries) {
        step.entry_t.push_back(e.t);
        step.entry_toi.push_back(e.toi_id);
      }
      if (!out.attention.empty()) step.attention = out.attention.front();
      trace->steps.push_back(std::move(step));
      if (uses_memory) ++trace->fuse_calls;
    }
    predictions.push_back(decode(out, visible.timepoints[i].graph, none));
  }
  return predictions;
}

}  // namespace

std::vector<sg::SceneGraph> infer_sequence(const sg::Recording& recording,
                                           const SceneGraphModel& model,
                                           const memory::MemoryConfig& memory,
                                           InferenceTrace* trace) {
  return run(recording, model, memory, nullptr, trace);
}

std::vector<sg::SceneGraph> infer_teacher_forced(const sg::Recording& recording,
                                                 const SceneGraphModel& model,
                                                 const memory::MemoryConfig& memory) {
  const auto graphs = recording.graphs();
  return run(recording, model, memory, &graphs, nullptr);
}

}  // namespace memsg::model
