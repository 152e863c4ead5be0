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

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "memsg/eval/metrics.hpp"
#include "memsg/sg/scene_graph.hpp"
#include "memsg/sg/vocabulary.hpp"

namespace memsg::eval {

struct EvalOptions {
  bool include_none = false;
  std::set<int> consistency_exclude;  // none is always excluded
};

struct EvalReport {
  F1Report f1;
  double consistency = 0.0;
  std::optional<double> gt_consistency;
  std::size_t recordings = 0;
  std::size_t timepoints = 0;
  std::string config_fingerprint;

  std::string to_json(const sg::Vocabulary& vocab) const;
};

EvalReport evaluate(std::span<const std::vector<sg::SceneGraph>> preds,
                    std::span<const std::vector<sg::SceneGraph>> gts, const sg::Vocabulary& vocab,
                    const EvalOptions& options = {});

// First 16 hex digits of the SHA-256 of a canonical config string.
std::string fingerprint(const std::string& config_text);

}  // namespace memsg::eval
