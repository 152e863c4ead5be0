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
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace memsg::sg {

// Entity and predicate class names. Class indices are list positions.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> entity_classes,
             std::vector<std::string> predicate_classes,
             std::string none_predicate, std::string head_surgeon_class,
             std::string patient_class);

  // Ships the predicates and entities named for orthopedic OR recordings.
  static Vocabulary default_vocabulary();

  static Vocabulary parse(std::string_view json_text);
  static Vocabulary load(const std::filesystem::path& path);
  std::string serialize() const;

  int entity_class(std::string_view name) const;
  int predicate(std::string_view name) const;
  const std::string& entity_name(int index) const;
  const std::string& predicate_name(int index) const;

  std::size_t num_entity_classes() const { return entity_classes_.size(); }
  std::size_t num_predicates() const { return predicate_classes_.size(); }

  int none_index() const { return none_index_; }
  int head_surgeon_index() const { return head_surgeon_index_; }
  int patient_index() const { return patient_index_; }

  const std::vector<std::string>& entity_classes() const { return entity_classes_; }
  const std::vector<std::string>& predicate_classes() const { return predicate_classes_; }

  bool operator==(const Vocabulary& other) const;

 private:
  std::vector<std::string> entity_classes_;
  std::vector<std::string> predicate_classes_;
  std::unordered_map<std::string, int> entity_lookup_;
  std::unordered_map<std::string, int> predicate_lookup_;
  int none_index_ = -1;
  int head_surgeon_index_ = -1;
  int patient_index_ = -1;
};

}  // namespace memsg::sg
