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

#include "memsg/synth/phase_model.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"
#include "memsg/error.hpp"
#include "memsg/util/hash.hpp"

namespace memsg::synth {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(what + " must lie in [0, 1]");
}

void check_side(const SideRelation& s, const sg::Vocabulary& vocab, const std::string& where) {
  vocab.entity_class(s.subject);
  vocab.entity_class(s.object);
  if (vocab.predicate(s.predicate) == vocab.none_index()) {
    throw ValidationError(where + ": side relation cannot use the none predicate");
  }
  if (s.subject == s.object) throw ValidationError(where + ": side relation is a self-loop");
  check_unit(s.rate, where + ": side relation rate");
}

ordered_json side_json(const SideRelation& s) {
  return {{"sub", s.subject}, {"pred", s.predicate}, {"obj", s.object}, {"rate", s.rate}};
}

SideRelation parse_side(const json& j) {
  return {j.at("sub").get<std::string>(), j.at("pred").get<std::string>(),
          j.at("obj").get<std::string>(), j.value("rate", 1.0)};
}

}  // namespace

std::size_t PhaseModel::phase_index(std::string_view name) const {
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (phases[i].name == name) return i;
  }
  throw ValidationError("unknown phase '" + std::string(name) + "'");
}

void PhaseModel::validate(const sg::Vocabulary& vocab) const {
  if (phases.empty()) throw ValidationError("scenario has no phases");
  if (feature_dim == 0) throw ValidationError("feature_dim must be positive");
  if (!(feature_noise_sigma >= 0.0) || !(prototype_scale > 0.0)) {
    throw ValidationError("feature_noise_sigma must be >= 0 and prototype_scale > 0");
  }
  check_unit(churn, "churn");
  if (max_phases < 1) throw ValidationError("max_phases must be >= 1");

  std::set<std::string> names;
  for (const auto& phase : phases) {
    const std::string where = "phase '" + phase.name + "'";
    if (!names.insert(phase.name).second) throw ValidationError("duplicate " + where);
    if (vocab.predicate(phase.main_action) == vocab.none_index()) {
      throw ValidationError(where + ": main action cannot be none");
    }
    if (phase.min_duration < 1 || phase.max_duration < phase.min_duration) {
      throw ValidationError(where + ": duration range must satisfy 1 <= min <= max");
    }
    std::set<std::pair<std::string, std::string>> pairs{
        {vocab.entity_name(vocab.head_surgeon_index()),
         vocab.entity_name(vocab.patient_index())}};
    auto all = common_side_relations;
    all.insert(all.end(), phase.side_relations.begin(), phase.side_relations.end());
    for (const auto& s : all) {
      check_side(s, vocab, where);
      if (!pairs.insert({s.subject, s.object}).second) {
        throw ValidationError(where + ": two relations on " + s.subject + " -> " + s.object);
      }
    }
    double total = 0.0;
    for (const auto& tr : phase.successors) {
      phase_index(tr.phase);
      check_unit(tr.probability, where + ": transition probability");
      total += tr.probability;
    }
    if (!phase.successors.empty() && std::abs(total - 1.0) > 1e-9) {
      throw ValidationError(where + ": transition probabilities sum to " + std::to_string(total));
    }
  }
  for (const auto& [a, b] : confusable_pairs) {
    const int ia = vocab.predicate(a);
    const int ib = vocab.predicate(b);
    if (ia == ib) throw ValidationError("confusable pair must name two distinct predicates");
  }
  std::set<std::string> classes;
  for (const auto& c : required_entities) {
    vocab.entity_class(c);
    if (!classes.insert(c).second) throw ValidationError("entity class '" + c + "' listed twice");
  }
  for (const auto& c : optional_entities) {
    vocab.entity_class(c);
    if (!classes.insert(c).second) throw ValidationError("entity class '" + c + "' listed twice");
  }
  const auto hs = vocab.entity_name(vocab.head_surgeon_index());
  const auto pat = vocab.entity_name(vocab.patient_index());
  auto required = std::set<std::string>(required_entities.begin(), required_entities.end());
  if (!required.count(hs) || !required.count(pat)) {
    throw ValidationError("head surgeon and patient must be required entities");
  }
  const int req = static_cast<int>(required_entities.size());
  if (min_entities < req || max_entities < min_entities ||
      max_entities > req + static_cast<int>(optional_entities.size())) {
    throw ValidationError("entity count range is inconsistent with the entity lists");
  }
}

std::string PhaseModel::to_json() const {
  ordered_json j;
  j["feature_dim"] = feature_dim;
  j["feature_noise_sigma"] = feature_noise_sigma;
  j["prototype_scale"] = prototype_scale;
  j["prototype_seed"] = prototype_seed;
  j["churn"] = churn;
  j["max_phases"] = max_phases;
  j["entities"] = {{"required", required_entities},
                   {"optional", optional_entities},
                   {"min", min_entities},
                   {"max", max_entities}};
  j["confusable_pairs"] = ordered_json::array();
  for (const auto& [a, b] : confusable_pairs) j["confusable_pairs"].push_back({a, b});
  j["common_side_relations"] = ordered_json::array();
  for (const auto& s : common_side_relations) j["common_side_relations"].push_back(side_json(s));
  j["phases"] = ordered_json::array();
  for (const auto& p : phases) {
    ordered_json pj;
    pj["name"] = p.name;
    pj["main_action"] = p.main_action;
    pj["duration"] = {p.min_duration, p.max_duration};
    pj["side_relations"] = ordered_json::array();
    for (const auto& s : p.side_relations) pj["side_relations"].push_back(side_json(s));
    pj["successors"] = ordered_json::array();
    for (const auto& tr : p.successors) {
      pj["successors"].push_back({{"phase", tr.phase}, {"p", tr.probability}});
    }
    j["phases"].push_back(std::move(pj));
  }
  return j.dump(2) + "\n";
}

PhaseModel PhaseModel::parse(std::string_view text) {
  try {
    const auto j = json::parse(text);
    PhaseModel m;
    m.feature_dim = j.value("feature_dim", m.feature_dim);
    m.feature_noise_sigma = j.value("feature_noise_sigma", m.feature_noise_sigma);
    m.prototype_scale = j.value("prototype_scale", m.prototype_scale);
    m.prototype_seed = j.value("prototype_seed", m.prototype_seed);
    m.churn = j.value("churn", m.churn);
    m.max_phases = j.value("max_phases", m.max_phases);
    if (j.contains("entities")) {
      const auto& e = j.at("entities");
      m.required_entities = e.value("required", std::vector<std::string>{});
      m.optional_entities = e.value("optional", std::vector<std::string>{});
      m.min_entities = e.value("min", m.min_entities);
      m.max_entities = e.value("max", m.max_entities);
    }
    for (const auto& pair : j.value("confusable_pairs", json::array())) {
      if (!pair.is_array() || pair.size() != 2) {
        throw DataError("confusable pair must be a two-element list");
      }
      m.confusable_pairs.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
    for (const auto& s : j.value("common_side_relations", json::array())) {
      m.common_side_relations.push_back(parse_side(s));
    }
    for (const auto& pj : j.at("phases")) {
      Phase p;
      p.name = pj.at("name").get<std::string>();
      p.main_action = pj.at("main_action").get<std::string>();
      const auto& d = pj.at("duration");
      if (d.is_array()) {
        if (d.size() != 2) throw DataError("phase duration must be [min, max]");
        p.min_duration = d[0].get<int>();
        p.max_duration = d[1].get<int>();
      } else {
        p.min_duration = p.max_duration = d.get<int>();
      }
      for (const auto& s : pj.value("side_relations", json::array())) {
        p.side_relations.push_back(parse_side(s));
      }
      for (const auto& tr : pj.value("successors", json::array())) {
        p.successors.push_back({tr.at("phase").get<std::string>(), tr.value("p", 1.0)});
      }
      m.phases.push_back(std::move(p));
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed scenario: ") + e.what());
  }
}

PhaseModel PhaseModel::load(const std::string& path) { return parse(util::read_file(path)); }

PhaseModel default_scenario() {
  PhaseModel m;
  m.feature_dim = 16;
  m.feature_noise_sigma = 1.0;
  m.prototype_scale = 1.0;
  m.prototype_seed = 20260417;
  m.churn = 0.5;
  // The tools are always on the scene: which one the head surgeon holds is
  // the only cue separating the three bone-work phases.
  m.required_entities = {"head_surgeon", "patient", "operating_table", "drill", "saw", "hammer"};
  m.optional_entities = {"assistant", "anaesthetist", "instrument_table"};
  m.min_entities = 6;
  m.max_entities = 8;
  m.confusable_pairs = {{"suturing", "cleaning"}, {"drilling", "sawing"}, {"drilling", "hammering"}};
  m.common_side_relations = {
      {"patient", "lyingOn", "operating_table", 1.0},
      {"assistant", "assisting", "head_surgeon", 0.85},
      {"anaesthetist", "closeTo", "patient", 0.7},
      {"instrument_table", "closeTo", "operating_table", 0.6},
  };
  auto phase = [](std::string name, std::string action, int lo, int hi,
                  std::vector<SideRelation> side, std::string next) {
    Phase p{std::move(name), std::move(action), lo, hi, std::move(side), {}};
    if (!next.empty()) p.successors.push_back({std::move(next), 1.0});
    return p;
  };
  m.phases = {
      phase("prep", "cleaning", 9, 15, {{"assistant", "closeTo", "patient", 0.6}}, "incision"),
      phase("incision", "touching", 8, 12, {{"assistant", "touching", "patient", 0.3}}, "drilling"),
      phase("drilling", "drilling", 8, 14, {{"head_surgeon", "holding", "drill", 0.9}}, "sawing"),
      phase("sawing", "sawing", 8, 14, {{"head_surgeon", "holding", "saw", 0.9}}, "hammering"),
      phase("hammering", "hammering", 8, 14, {{"head_surgeon", "holding", "hammer", 0.9}},
            "cementing"),
      phase("cementing", "cementing", 8, 14, {{"assistant", "closeTo", "patient", 0.6}},
            "closing"),
      phase("closing", "suturing", 11, 17, {{"assistant", "touching", "patient", 0.3}}, ""),
  };
  return m;
}

FeatureSampler::FeatureSampler(const PhaseModel& model, const sg::Vocabulary& vocab)
    : dim_(model.feature_dim), sigma_(model.feature_noise_sigma) {
  std::mt19937_64 rng(model.prototype_seed);
  std::normal_distribution<double> normal(0.0, model.prototype_scale);
  prototypes_.resize(vocab.num_predicates());
  for (auto& proto : prototypes_) {
    proto.resize(dim_);
    for (auto& v : proto) v = normal(rng);
  }
  for (const auto& [a, b] : model.confusable_pairs) {
    prototypes_[vocab.predicate(b)] = prototypes_[vocab.predicate(a)];
  }
}

std::vector<double> FeatureSampler::sample(int predicate, std::mt19937_64& rng) const {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> out = prototypes_.at(predicate);
  for (auto& v : out) v += sigma_ * noise(rng);
  return out;
}

int FeatureSampler::nearest_prototype(const std::vector<double>& feature) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < prototypes_.size(); ++c) {
    double d = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double diff = feature[k] - prototypes_[c][k];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace memsg::synth
