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

#include <set>
#include <string>
#include <vector>

#include "memsg/sg/scene_graph.hpp"
#include "memsg/sg/vocabulary.hpp"

namespace memsg::fixtures {

// Hand-scored metric cases on a four-entity operating-room graph
// (0 head_surgeon, 1 assistant, 2 patient, 3 operating_table; 12 ordered pairs).

struct F1Case {
  std::string name;
  std::vector<sg::SceneGraph> preds;
  std::vector<sg::SceneGraph> gts;
  bool include_none = false;
  double expected = 0.0;
};

struct ConsistencyCase {
  std::string name;
  std::vector<sg::SceneGraph> graphs;
  std::set<std::string> excluded;
  double expected = 0.0;
};

struct Rel {
  int subject;
  const char* predicate;
  int object;
};

inline sg::SceneGraph graph(const sg::Vocabulary& v, std::vector<Rel> rels) {
  sg::SceneGraph g;
  g.entities = {{0, v.entity_class("head_surgeon")},
                {1, v.entity_class("assistant")},
                {2, v.entity_class("patient")},
                {3, v.entity_class("operating_table")}};
  for (const auto& r : rels) g.relations.push_back({r.subject, v.predicate(r.predicate), r.object});
  return g;
}

inline std::vector<F1Case> f1_cases(const sg::Vocabulary& v) {
  auto g = [&](std::vector<Rel> r) { return graph(v, std::move(r)); };
  const auto drill = g({{0, "drilling", 2}});
  const auto saw = g({{0, "sawing", 2}});
  const auto empty = g({});
  std::vector<F1Case> c;
  c.push_back({"identical", {g({{0, "drilling", 2}, {2, "lyingOn", 3}})},
               {g({{0, "drilling", 2}, {2, "lyingOn", 3}})}, false, 1.0});
  c.push_back({"all_none_predicted", {empty, empty}, {drill, g({{2, "lyingOn", 3}})}, false, 0.0});
  // drilling: tp 1, predicted 2, support 1 -> 2/3; sawing 0.
  c.push_back({"one_hit_one_confusion", {drill, drill}, {drill, saw}, false, 1.0 / 3.0});
  c.push_back({"nothing_anywhere", {empty}, {empty}, false, 1.0});
  c.push_back({"missed_side_relation", {drill}, {g({{0, "drilling", 2}, {2, "lyingOn", 3}})}, false,
               0.5});
  c.push_back({"false_positive_class", {g({{0, "drilling", 2}, {1, "assisting", 0}})}, {drill},
               false, 0.5});
  // none: 22 of 22 -> 1; averaged with 2/3 and 0.
  c.push_back({"include_none", {drill, drill}, {drill, saw}, true, 5.0 / 9.0});
  // precision 1, recall 2/3 -> 0.8
  c.push_back({"partial_recall", {drill, drill, empty}, {drill, drill, drill}, false, 0.8});
  c.push_back({"swapped", {saw, drill}, {drill, saw}, false, 0.0});
  c.push_back({"four_classes",
               {g({{0, "drilling", 2}, {2, "lyingOn", 3}, {1, "closeTo", 2}})},
               {g({{0, "drilling", 2}, {1, "assisting", 0}, {2, "lyingOn", 3}})}, false, 0.5});
  // Relation on a different pair counts as one miss and one false positive.
  c.push_back({"wrong_pair", {g({{1, "holding", 3}})}, {g({{0, "holding", 3}})}, false, 0.0});
  return c;
}

inline std::vector<ConsistencyCase> consistency_cases(const sg::Vocabulary& v) {
  auto g = [&](std::vector<Rel> r) { return graph(v, std::move(r)); };
  const auto ad = g({{1, "assisting", 0}, {0, "drilling", 2}});
  const auto adc = g({{1, "assisting", 0}, {0, "drilling", 2}, {1, "cleaning", 2}});
  std::vector<ConsistencyCase> c;
  c.push_back({"repeated", {ad, ad, ad}, {}, 1.0});
  c.push_back({"two_thirds", {ad, adc}, {}, 2.0 / 3.0});
  c.push_back({"disjoint", {g({{0, "drilling", 2}}), g({{0, "sawing", 2}})}, {}, 0.0});
  c.push_back({"both_empty", {g({}), g({})}, {}, 1.0});
  c.push_back({"empty_then_one", {g({}), g({{0, "drilling", 2}})}, {}, 0.0});
  // (2/3 + 1/3) / 2
  c.push_back({"three_steps", {ad, adc, g({{1, "cleaning", 2}})}, {}, 0.5});
  c.push_back({"duplicate_predicates",
               {g({{0, "holding", 3}, {1, "holding", 3}}), g({{1, "holding", 3}})}, {}, 1.0});
  c.push_back({"with_lying_on",
               {g({{2, "lyingOn", 3}, {0, "drilling", 2}}), g({{2, "lyingOn", 3}, {0, "sawing", 2}})},
               {}, 1.0 / 3.0});
  c.push_back({"lying_on_excluded",
               {g({{2, "lyingOn", 3}, {0, "drilling", 2}}), g({{2, "lyingOn", 3}, {0, "sawing", 2}})},
               {"lyingOn"}, 0.0});
  return c;
}

}  // namespace memsg::fixtures
