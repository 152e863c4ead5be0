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

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "memsg/error.hpp"
#include "memsg/sg/recording.hpp"

namespace memsg::sg {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t Recording::feature_dim() const {
  for (const auto& tp : timepoints) {
    if (!tp.pair_features.empty()) return tp.pair_features.begin()->second.size();
  }
  return 0;
}

bool Recording::has_features() const { return feature_dim() > 0; }

std::vector<SceneGraph> Recording::graphs() const {
  std::vector<SceneGraph> out;
  out.reserve(timepoints.size());
  for (const auto& tp : timepoints) out.push_back(tp.graph);
  return out;
}

void validate(const Recording& recording, const Vocabulary& vocab) {
  const std::size_t dim = recording.feature_dim();
  for (std::size_t i = 0; i < recording.timepoints.size(); ++i) {
    const auto& tp = recording.timepoints[i];
    if (tp.t != static_cast<int>(i)) {
      throw ValidationError("non-consecutive timepoints: expected t=" + std::to_string(i) +
                            ", found t=" + std::to_string(tp.t));
    }
    validate(tp.graph, vocab);
    if (dim == 0) continue;
    const auto pairs = ordered_pairs(tp.graph);
    if (pairs.size() != tp.pair_features.size()) {
      throw ValidationError("pair_features at t=" + std::to_string(tp.t) + " cover " +
                            std::to_string(tp.pair_features.size()) + " pairs, expected " +
                            std::to_string(pairs.size()));
    }
    for (const auto& pair : pairs) {
      auto it = tp.pair_features.find(pair);
      if (it == tp.pair_features.end()) {
        throw ValidationError("pair_features at t=" + std::to_string(tp.t) + " missing pair " +
                              std::to_string(pair.subject) + "-" + std::to_string(pair.object));
      }
      if (it->second.size() != dim) {
        throw ValidationError("pair_features dimension mismatch at t=" + std::to_string(tp.t) +
                              ": " + std::to_string(it->second.size()) + " vs " +
                              std::to_string(dim));
      }
      for (double v : it->second) {
        if (!std::isfinite(v)) {
          throw ValidationError("non-finite pair feature at t=" + std::to_string(tp.t));
        }
      }
    }
  }
}

namespace {

EntityPair parse_pair_key(const std::string& key, std::size_t line) {
  const auto dash = key.find('-', 1);
  if (dash == std::string::npos) throw ParseError(line, "bad pair_features key '" + key + "'");
  try {
    std::size_t used_a = 0;
    std::size_t used_b = 0;
    const int a = std::stoi(key.substr(0, dash), &used_a);
    const int b = std::stoi(key.substr(dash + 1), &used_b);
    if (used_a != dash || used_b != key.size() - dash - 1) throw std::invalid_argument(key);
    return {a, b};
  } catch (const std::logic_error&) {
    throw ParseError(line, "bad pair_features key '" + key + "'");
  }
}

Timepoint parse_line(const std::string& text, std::size_t line, const Vocabulary& vocab,
                     std::string& take_id) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line, "timepoint record must be an object");
  Timepoint tp;
  try {
    const auto id = j.at("take_id").get<std::string>();
    if (take_id.empty()) {
      take_id = id;
    } else if (id != take_id) {
      throw ParseError(line, "take_id '" + id + "' differs from '" + take_id + "'");
    }
    tp.t = j.at("t").get<int>();
    for (const auto& e : j.at("entities")) {
      tp.graph.entities.push_back(
          {e.at("id").get<int>(), vocab.entity_class(e.at("class").get<std::string>())});
    }
    for (const auto& r : j.at("relations")) {
      tp.graph.relations.push_back({r.at("sub").get<int>(),
                                    vocab.predicate(r.at("pred").get<std::string>()),
                                    r.at("obj").get<int>()});
    }
    if (auto it = j.find("pair_features"); it != j.end()) {
      for (const auto& [key, values] : it->items()) {
        tp.pair_features.emplace(parse_pair_key(key, line), values.get<std::vector<double>>());
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(line, std::string("bad timepoint record: ") + e.what());
  } catch (const VocabularyError& e) {
    throw VocabularyError("line " + std::to_string(line) + ": " + e.what());
  }
  try {
    validate(tp.graph, vocab);
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line) + ": " + e.what());
  }
  return tp;
}

}  // namespace

Recording parse_recording(std::string_view text, const Vocabulary& vocab) {
  Recording rec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rec.timepoints.push_back(parse_line(line, line_no, vocab, rec.take_id));
  }
  validate(rec, vocab);
  return rec;
}

std::string serialize_recording(const Recording& recording, const Vocabulary& vocab,
                                bool include_features) {
  const bool features = include_features && recording.has_features();
  std::string out;
  for (const auto& tp : recording.timepoints) {
    ordered_json j;
    j["take_id"] = recording.take_id;
    j["t"] = tp.t;
    j["entities"] = ordered_json::array();
    for (const auto& e : tp.graph.entities) {
      j["entities"].push_back({{"id", e.id}, {"class", vocab.entity_name(e.class_index)}});
    }
    j["relations"] = ordered_json::array();
    for (const auto& r : tp.graph.relations) {
      j["relations"].push_back(
          {{"sub", r.subject}, {"pred", vocab.predicate_name(r.predicate)}, {"obj", r.object}});
    }
    if (features) {
      ordered_json pf = ordered_json::object();
      for (const auto& [pair, values] : tp.pair_features) {
        pf[std::to_string(pair.subject) + "-" + std::to_string(pair.object)] = values;
      }
      j["pair_features"] = std::move(pf);
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

Recording load_recording(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open recording " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_recording(buffer.str(), vocab);
}

void save_recording(const std::filesystem::path& path, const Recording& recording,
                    const Vocabulary& vocab, bool include_features) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write recording " + path.string());
  out << serialize_recording(recording, vocab, include_features);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace memsg::sg
