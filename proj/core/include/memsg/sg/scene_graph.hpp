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

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memsg/sg/vocabulary.hpp"

namespace memsg::sg {

using EntityId = int;
using ClassIndex = int;
using PredicateIndex = int;

struct Entity {
  EntityId id = 0;
  ClassIndex class_index = 0;

  auto operator<=>(const Entity&) const = default;
};

struct Relation {
  EntityId subject = 0;
  PredicateIndex predicate = 0;
  EntityId object = 0;

  auto operator<=>(const Relation&) const = default;
};

struct SceneGraph {
  std::vector<Entity> entities;
  std::vector<Relation> relations;

  bool operator==(const SceneGraph&) const = default;

  bool has_entity(EntityId id) const;
  std::optional<PredicateIndex> predicate_between(EntityId subject, EntityId object) const;
  // Entity ids in ascending order.
  std::vector<EntityId> sorted_entity_ids() const;
};

// Ordered (subject, object) pair of entity ids.
struct EntityPair {
  EntityId subject = 0;
  EntityId object = 0;

  auto operator<=>(const EntityPair&) const = default;
};

// All ordered pairs of distinct entities, lexicographic by (subject, object) id.
std::vector<EntityPair> ordered_pairs(const SceneGraph& graph);

// Throws ValidationError naming the violated invariant.
void validate(const SceneGraph& graph, const Vocabulary& vocab);

// Predicates present in the graph, minus none and any caller-excluded classes.
std::set<PredicateIndex> predicate_set(const SceneGraph& graph, const Vocabulary& vocab,
                                       const std::set<PredicateIndex>& excluded = {});

// Predicate on the head-surgeon -> patient pair. nullopt is "no main action".
std::optional<PredicateIndex> main_action(const SceneGraph& graph, const Vocabulary& vocab);

// Class index used by the action head for "no main action".
inline int main_action_class(const std::optional<PredicateIndex>& action,
                             const Vocabulary& vocab) {
  return action ? *action : static_cast<int>(vocab.num_predicates());
}

// Content key that is stable under reordering of the entity and relation
// lists. Graphs with equal keys encode to the same feature.
std::string canonical_key(const SceneGraph& graph);

}  // namespace memsg::sg
