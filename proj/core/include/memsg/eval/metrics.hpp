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
#include <set>
#include <span>
#include <string>
#include <vector>

#include "memsg/sg/scene_graph.hpp"
#include "memsg/sg/vocabulary.hpp"

namespace memsg::eval {

struct ClassScore {
  int predicate = 0;
  std::string name;
  std::size_t true_positive = 0;
  std::size_t predicted = 0;  // column sum
  std::size_t support = 0;    // row sum (ground truth count)
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool included = false;  // part of the macro average
};

// Confusion over ordered entity pairs: rows are ground truth, columns are
// predictions, both indexed by predicate (none for unrelated pairs).
class Confusion {
 public:
  explicit Confusion(std::size_t num_predicates);

  void add(int gt, int pred, std::size_t count = 1);
  // Accumulates every ordered pair of one aligned timepoint.
  void add_timepoint(const sg::SceneGraph& pred, const sg::SceneGraph& gt, int none_index);
  void add_sequence(std::span<const sg::SceneGraph> preds, std::span<const sg::SceneGraph> gts,
                    int none_index);

  std::size_t at(int gt, int pred) const { return counts_[gt * n_ + pred]; }
  std::size_t size() const { return n_; }
  std::vector<std::vector<std::size_t>> matrix() const;

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

struct F1Report {
  std::vector<ClassScore> per_class;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<int> included_classes;
  double macro_f1 = 0.0;
};

// Per-class F1 uses 0/0 := 0. The macro average runs over the classes that
// occur in ground truth or predictions, none excluded unless include_none;
// an empty class set scores 1.
F1Report f1_report(const Confusion& confusion, const sg::Vocabulary& vocab, bool include_none);

F1Report macro_f1(std::span<const sg::SceneGraph> preds, std::span<const sg::SceneGraph> gts,
                  const sg::Vocabulary& vocab, bool include_none = false);

// Pools the confusion over several aligned recordings.
F1Report macro_f1(std::span<const std::vector<sg::SceneGraph>> preds,
                  std::span<const std::vector<sg::SceneGraph>> gts, const sg::Vocabulary& vocab,
                  bool include_none = false);

// Intersection over union of adjacent predicate sets. none is always
// excluded; `excluded` removes further predicates. Two empty sets score 1.
double set_iou(const std::set<int>& a, const std::set<int>& b);
double consistency(std::span<const sg::SceneGraph> graphs, const sg::Vocabulary& vocab,
                   const std::set<int>& excluded = {});

// Mean over every adjacent pair of every sequence (sequences shorter than 2
// contribute nothing; at least one pair overall is required).
double consistency(std::span<const std::vector<sg::SceneGraph>> sequences,
                   const sg::Vocabulary& vocab, const std::set<int>& excluded = {});

}  // namespace memsg::eval
