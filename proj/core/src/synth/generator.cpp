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

#include "memsg/synth/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include "json.hpp"
#include "memsg/error.hpp"
#include "memsg/util/hash.hpp"
#include "memsg/util/seed.hpp"

namespace memsg::synth {
namespace {

struct Slot {
  const SideRelation* spec;
  bool present = false;
};

std::size_t sample_successor(const Phase& phase, const PhaseModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (const auto& tr : phase.successors) {
    acc += tr.probability;
    if (u < acc) return model.phase_index(tr.phase);
  }
  return model.phase_index(phase.successors.back().phase);
}

}  // namespace

GeneratedRecording generate_recording(const PhaseModel& model, const sg::Vocabulary& vocab,
                                      std::uint64_t seed, const std::string& take_id) {
  model.validate(vocab);
  std::mt19937_64 rng(util::derive_seed(seed, "structure"));
  std::mt19937_64 feature_rng(util::derive_seed(seed, "features"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const FeatureSampler sampler(model, vocab);

  // Entity roster, fixed for the whole recording, with shuffled ids.
  std::vector<std::string> classes = model.required_entities;
  const int lo = model.min_entities;
  const int hi = model.max_entities;
  const int count = std::uniform_int_distribution<int>(lo, hi)(rng);
  std::vector<std::string> optional = model.optional_entities;
  std::shuffle(optional.begin(), optional.end(), rng);
  const auto extra = static_cast<std::size_t>(count) - classes.size();
  classes.insert(classes.end(), optional.begin(), optional.begin() + static_cast<std::ptrdiff_t>(extra));
  std::vector<int> ids(classes.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<sg::Entity> entities;
  std::map<std::string, int> id_of;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    entities.push_back({ids[i], vocab.entity_class(classes[i])});
    id_of[classes[i]] = ids[i];
  }
  std::sort(entities.begin(), entities.end());

  // Phase path.
  GeneratedRecording out;
  std::size_t phase = 0;
  int t = 0;
  while (true) {
    const Phase& p = model.phases[phase];
    const int length = std::uniform_int_distribution<int>(p.min_duration, p.max_duration)(rng);
    out.segments.push_back({phase, t, length});
    t += length;
    if (p.successors.empty() || static_cast<int>(out.segments.size()) >= model.max_phases) break;
    phase = sample_successor(p, model, rng);
  }

  const int surgeon = id_of.at(vocab.entity_name(vocab.head_surgeon_index()));
  const int patient = id_of.at(vocab.entity_name(vocab.patient_index()));
  std::vector<Slot> common;
  for (const auto& s : model.common_side_relations) common.push_back({&s, unit(rng) < s.rate});

  out.recording.take_id = take_id;
  for (const auto& segment : out.segments) {
    const Phase& p = model.phases[segment.phase];
    std::vector<Slot> local;
    for (const auto& s : p.side_relations) local.push_back({&s, unit(rng) < s.rate});
    const int action = vocab.predicate(p.main_action);
    for (int k = 0; k < segment.length; ++k) {
      if (k > 0 || segment.start > 0) {
        for (auto* slots : {&common, &local}) {
          for (auto& slot : *slots) {
            if (unit(rng) < model.churn) slot.present = unit(rng) < slot.spec->rate;
          }
        }
      }
      sg::Timepoint tp;
      tp.t = segment.start + k;
      tp.graph.entities = entities;
      tp.graph.relations.push_back({surgeon, action, patient});
      for (const auto* slots : {&common, &local}) {
        for (const auto& slot : *slots) {
          if (!slot.present) continue;
          auto s = id_of.find(slot.spec->subject);
          auto o = id_of.find(slot.spec->object);
          if (s == id_of.end() || o == id_of.end()) continue;
          tp.graph.relations.push_back({s->second, vocab.predicate(slot.spec->predicate), o->second});
        }
      }
      std::sort(tp.graph.relations.begin(), tp.graph.relations.end());
      for (const auto& pair : sg::ordered_pairs(tp.graph)) {
        const auto pred = tp.graph.predicate_between(pair.subject, pair.object);
        tp.pair_features[pair] = sampler.sample(pred.value_or(vocab.none_index()), feature_rng);
      }
      out.recording.timepoints.push_back(std::move(tp));
    }
  }
  sg::validate(out.recording, vocab);
  return out;
}

std::string BenchmarkManifest::to_json() const {
  nlohmann::ordered_json j;
  j["master_seed"] = master_seed;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    j["files"].push_back({{"split", f.split},
                          {"path", f.path},
                          {"take_id", f.take_id},
                          {"seed", f.seed},
                          {"sha256", f.sha256}});
  }
  return j.dump(2) + "\n";
}

BenchmarkManifest make_benchmark(const PhaseModel& model, const sg::Vocabulary& vocab,
                                 std::size_t n_train, std::size_t n_val, std::size_t n_test,
                                 std::uint64_t seed, const std::filesystem::path& root) {
  if (n_train < 1 || n_val < 1 || n_test < 1) {
    throw DataError("every split needs at least one recording");
  }
  model.validate(vocab);
  BenchmarkManifest manifest;
  manifest.master_seed = seed;
  const std::pair<const char*, std::size_t> splits[] = {
      {"train", n_train}, {"val", n_val}, {"test", n_test}};
  for (const auto& [split, n] : splits) {
    std::filesystem::create_directories(root / split);
    for (std::size_t i = 0; i < n; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%s_%03zu", split, i);
      const std::string take_id = name;
      const std::uint64_t take_seed = util::derive_seed(seed, take_id);
      const auto generated = generate_recording(model, vocab, take_seed, take_id);
      const std::string rel = std::string(split) + "/" + take_id + ".jsonl";
      const std::string text = sg::serialize_recording(generated.recording, vocab);
      util::write_file_atomic(root / rel, text);
      manifest.files.push_back({split, rel, take_id, take_seed, util::sha256_hex(text)});
    }
  }
  util::write_file_atomic(root / "vocab.json", vocab.serialize());
  util::write_file_atomic(root / "scenario.json", model.to_json());
  util::write_file_atomic(root / "manifest.json", manifest.to_json());
  return manifest;
}

std::vector<sg::Recording> load_split(const std::filesystem::path& dir,
                                      const sg::Vocabulary& vocab) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<sg::Recording> out;
  for (const auto& f : files) out.push_back(sg::load_recording(f, vocab));
  return out;
}

Benchmark load_benchmark(const std::filesystem::path& root, const sg::Vocabulary& vocab) {
  return {load_split(root / "train", vocab), load_split(root / "val", vocab),
          load_split(root / "test", vocab)};
}

}  // namespace memsg::synth
