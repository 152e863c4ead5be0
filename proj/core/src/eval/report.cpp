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

#include "memsg/eval/report.hpp"

#include "json.hpp"
#include "memsg/util/hash.hpp"

namespace memsg::eval {

std::string EvalReport::to_json(const sg::Vocabulary& vocab) const {
  nlohmann::ordered_json j;
  j["macro_f1"] = f1.macro_f1;
  j["consistency"] = consistency;
  if (gt_consistency) j["gt_consistency"] = *gt_consistency;
  j["recordings"] = recordings;
  j["timepoints"] = timepoints;
  j["config_fingerprint"] = config_fingerprint;
  j["included_classes"] = nlohmann::ordered_json::array();
  for (int c : f1.included_classes) j["included_classes"].push_back(vocab.predicate_name(c));
  j["per_class"] = nlohmann::ordered_json::array();
  for (const auto& s : f1.per_class) {
    j["per_class"].push_back({{"predicate", s.name},
                              {"precision", s.precision},
                              {"recall", s.recall},
                              {"f1", s.f1},
                              {"support", s.support},
                              {"predicted", s.predicted},
                              {"true_positive", s.true_positive},
                              {"included", s.included}});
  }
  j["confusion_labels"] = vocab.predicate_classes();
  j["confusion"] = f1.confusion;
  return j.dump(2) + "\n";
}

EvalReport evaluate(std::span<const std::vector<sg::SceneGraph>> preds,
                    std::span<const std::vector<sg::SceneGraph>> gts, const sg::Vocabulary& vocab,
                    const EvalOptions& options) {
  EvalReport report;
  report.f1 = macro_f1(preds, gts, vocab, options.include_none);
  report.consistency = consistency(preds, vocab, options.consistency_exclude);
  report.gt_consistency = consistency(gts, vocab, options.consistency_exclude);
  report.recordings = preds.size();
  for (const auto& p : preds) report.timepoints += p.size();
  return report;
}

std::string fingerprint(const std::string& config_text) {
  return util::sha256_hex(config_text).substr(0, 16);
}

}  // namespace memsg::eval
