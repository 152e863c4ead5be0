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
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memsg/sg/vocabulary.hpp"

namespace memsg::synth {

struct SideRelation {
  std::string subject;    // entity class name
  std::string predicate;  // predicate name
  std::string object;     // entity class name
  double rate = 1.0;      // stationary probability of being present
};

struct Transition {
  std::string phase;
  double probability = 1.0;
};

struct Phase {
  std::string name;
  std::string main_action;  // head surgeon -> patient predicate
  int min_duration = 1;
  int max_duration = 1;
  std::vector<SideRelation> side_relations;
  std::vector<Transition> successors;  // empty: terminal phase
};

struct PhaseModel {
  std::vector<Phase> phases;  // the first phase starts every recording
  // Active in every phase; their presence state persists across phases.
  std::vector<SideRelation> common_side_relations;
  std::vector<std::pair<std::string, std::string>> confusable_pairs;
  std::size_t feature_dim = 16;
  double feature_noise_sigma = 1.0;
  double prototype_scale = 1.0;
  std::uint64_t prototype_seed = 0;
  // Per timepoint probability that a side relation re-draws its presence.
  double churn = 0.1;
  std::vector<std::string> required_entities;
  std::vector<std::string> optional_entities;
  int min_entities = 3;
  int max_entities = 8;
  int max_phases = 64;  // guards cyclic transition graphs

  void validate(const sg::Vocabulary& vocab) const;
  std::size_t phase_index(std::string_view name) const;

  std::string to_json() const;
  static PhaseModel parse(std::string_view text);
  static PhaseModel load(const std::string& path);
};

// The reference scenario: seven sequential phases. suturing/cleaning share a
// visual prototype, as do drilling/sawing/hammering.
PhaseModel default_scenario();

// Per-predicate Gaussian feature prototypes; confusable predicates share one.
class FeatureSampler {
 public:
  FeatureSampler(const PhaseModel& model, const sg::Vocabulary& vocab);

  const std::vector<double>& prototype(int predicate) const { return prototypes_.at(predicate); }
  std::vector<double> sample(int predicate, std::mt19937_64& rng) const;
  std::size_t dim() const { return dim_; }
  double sigma() const { return sigma_; }

  // Index of the nearest prototype (lowest index on ties).
  int nearest_prototype(const std::vector<double>& feature) const;

 private:
  std::size_t dim_;
  double sigma_;
  std::vector<std::vector<double>> prototypes_;
};

}  // namespace memsg::synth
