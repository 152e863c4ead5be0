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

#include "memsg/sg/scene_graph.hpp"

#include <algorithm>
#include <sstream>

#include "memsg/error.hpp"

namespace memsg::sg {

bool SceneGraph::has_entity(EntityId id) const {
  return std::any_of(entities.begin(), entities.end(),
                     [id](const Entity& e) { return e.id == id; });
}

std::optional<PredicateIndex> SceneGraph::predicate_between(EntityId subject,
                                                           EntityId object) const {
  for (const auto& r : relations) {
    if (r.subject == subject && r.object == object) return r.predicate;
  }
  return std::nullopt;
}

std::vector<EntityId> SceneGraph::sorted_entity_ids() const {
  std::vector<EntityId> ids;
  ids.reserve(entities.size());
  for (const auto& e : entities) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<EntityPair> ordered_pairs(const SceneGraph& graph) {
  const auto ids = graph.sorted_entity_ids();
  std::vector<EntityPair> pairs;
  pairs.reserve(ids.size() * (ids.size() > 0 ? ids.size() - 1 : 0));
  for (EntityId s : ids) {
    for (EntityId o : ids) {
      if (s != o) pairs.push_back({s, o});
    }
  }
  return pairs;
}

void validate(const SceneGraph& graph, const Vocabulary& vocab) {
  std::set<EntityId> ids;
  for (const auto& e : graph.entities) {
    if (e.id < 0) throw ValidationError("negative entity id " + std::to_string(e.id));
    if (!ids.insert(e.id).second) {
      throw ValidationError("duplicate entity id " + std::to_string(e.id));
    }
    if (e.class_index < 0 ||
        static_cast<std::size_t>(e.class_index) >= vocab.num_entity_classes()) {
      throw ValidationError("entity class index out of range for id " + std::to_string(e.id));
    }
  }
  std::set<EntityPair> related;
  for (const auto& r : graph.relations) {
    if (!ids.count(r.subject) || !ids.count(r.object)) {
      throw ValidationError("relation references unknown entity (" +
                            std::to_string(r.subject) + " -> " + std::to_string(r.object) + ")");
    }
    if (r.subject == r.object) {
      throw ValidationError("self-loop on entity " + std::to_string(r.subject));
    }
    if (r.predicate < 0 || static_cast<std::size_t>(r.predicate) >= vocab.num_predicates()) {
      throw ValidationError("predicate index out of range");
    }
    if (!related.insert({r.subject, r.object}).second) {
      throw ValidationError("more than one predicate on pair (" + std::to_string(r.subject) +
                            ", " + std::to_string(r.object) + ")");
    }
  }
}

std::set<PredicateIndex> predicate_set(const SceneGraph& graph, const Vocabulary& vocab,
                                       const std::set<PredicateIndex>& excluded) {
  std::set<PredicateIndex> out;
  for (const auto& r : graph.relations) {
    if (r.predicate == vocab.none_index() || excluded.count(r.predicate)) continue;
    out.insert(r.predicate);
  }
  return out;
}

std::optional<PredicateIndex> main_action(const SceneGraph& graph, const Vocabulary& vocab) {
  std::optional<EntityId> surgeon;
  std::optional<EntityId> patient;
  for (const auto& e : graph.entities) {
    if (e.class_index == vocab.head_surgeon_index()) {
      if (surgeon) throw ValidationError("ambiguous head surgeon");
      surgeon = e.id;
    } else if (e.class_index == vocab.patient_index() && !patient) {
      patient = e.id;
    }
  }
  if (!surgeon || !patient) return std::nullopt;
  auto pred = graph.predicate_between(*surgeon, *patient);
  if (!pred || *pred == vocab.none_index()) return std::nullopt;
  return pred;
}

std::string canonical_key(const SceneGraph& graph) {
  auto entities = graph.entities;
  auto relations = graph.relations;
  std::sort(entities.begin(), entities.end());
  std::sort(relations.begin(), relations.end());
  std::ostringstream key;
  for (const auto& e : entities) key << e.id << ':' << e.class_index << ',';
  key << '|';
  for (const auto& r : relations) key << r.subject << '>' << r.predicate << '>' << r.object << ',';
  return key.str();
}

}  // namespace memsg::sg
