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

#include "memsg/sg/vocabulary.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "memsg/error.hpp"

namespace memsg::sg {
namespace {

std::unordered_map<std::string, int> index_names(const std::vector<std::string>& names,
                                                 const char* what) {
  std::unordered_map<std::string, int> lookup;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) {
      throw VocabularyError(std::string("empty name in ") + what);
    }
    if (!lookup.emplace(names[i], static_cast<int>(i)).second) {
      throw VocabularyError(std::string("duplicate name '") + names[i] + "' in " + what);
    }
  }
  return lookup;
}

int require(const std::unordered_map<std::string, int>& lookup, const std::string& name,
            const char* what) {
  auto it = lookup.find(name);
  if (it == lookup.end()) {
    throw VocabularyError(std::string(what) + " '" + name + "' is not a declared class");
  }
  return it->second;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> entity_classes,
                       std::vector<std::string> predicate_classes, std::string none_predicate,
                       std::string head_surgeon_class, std::string patient_class)
    : entity_classes_(std::move(entity_classes)),
      predicate_classes_(std::move(predicate_classes)) {
  entity_lookup_ = index_names(entity_classes_, "entity_classes");
  predicate_lookup_ = index_names(predicate_classes_, "predicate_classes");
  none_index_ = require(predicate_lookup_, none_predicate, "none predicate");
  head_surgeon_index_ = require(entity_lookup_, head_surgeon_class, "head_surgeon class");
  patient_index_ = require(entity_lookup_, patient_class, "patient class");
  if (head_surgeon_index_ == patient_index_) {
    throw VocabularyError("head_surgeon and patient must be different classes");
  }
}

Vocabulary Vocabulary::default_vocabulary() {
  return Vocabulary(
      {"head_surgeon", "assistant", "anaesthetist", "patient", "operating_table",
       "instrument_table", "drill", "saw", "hammer"},
      {"assisting", "drilling", "cleaning", "sawing", "hammering", "suturing", "touching",
       "cementing", "lyingOn", "closeTo", "holding", "none"},
      "none", "head_surgeon", "patient");
}

Vocabulary Vocabulary::parse(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
    return Vocabulary(j.at("entity_classes").get<std::vector<std::string>>(),
                      j.at("predicate_classes").get<std::vector<std::string>>(),
                      j.at("none").get<std::string>(), j.at("head_surgeon").get<std::string>(),
                      j.at("patient").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw VocabularyError(std::string("malformed vocabulary: ") + e.what());
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string Vocabulary::serialize() const {
  nlohmann::ordered_json j;
  j["entity_classes"] = entity_classes_;
  j["predicate_classes"] = predicate_classes_;
  j["none"] = predicate_classes_[none_index_];
  j["head_surgeon"] = entity_classes_[head_surgeon_index_];
  j["patient"] = entity_classes_[patient_index_];
  return j.dump(2) + "\n";
}

int Vocabulary::entity_class(std::string_view name) const {
  auto it = entity_lookup_.find(std::string(name));
  if (it == entity_lookup_.end()) {
    throw VocabularyError("unknown entity class '" + std::string(name) + "'");
  }
  return it->second;
}

int Vocabulary::predicate(std::string_view name) const {
  auto it = predicate_lookup_.find(std::string(name));
  if (it == predicate_lookup_.end()) {
    throw VocabularyError("unknown predicate '" + std::string(name) + "'");
  }
  return it->second;
}

const std::string& Vocabulary::entity_name(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= entity_classes_.size()) {
    throw VocabularyError("entity class index out of range: " + std::to_string(index));
  }
  return entity_classes_[index];
}

const std::string& Vocabulary::predicate_name(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= predicate_classes_.size()) {
    throw VocabularyError("predicate index out of range: " + std::to_string(index));
  }
  return predicate_classes_[index];
}

bool Vocabulary::operator==(const Vocabulary& other) const {
  return entity_classes_ == other.entity_classes_ &&
         predicate_classes_ == other.predicate_classes_ && none_index_ == other.none_index_ &&
         head_surgeon_index_ == other.head_surgeon_index_ &&
         patient_index_ == other.patient_index_;
}

}  // namespace memsg::sg
