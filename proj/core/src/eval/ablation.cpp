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

#include "memsg/eval/ablation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "memsg/error.hpp"
#include "memsg/eval/metrics.hpp"
#include "memsg/model/infer.hpp"

namespace memsg::eval {

std::string_view to_string(Technique technique) {
  switch (technique) {
    case Technique::kFull:
      return "full";
    case Technique::kNoAugmentation:
      return "no_augmentation";
    case Technique::kNoToi:
      return "no_toi";
    case Technique::kNoEndToEnd:
      return "no_end_to_end";
    case Technique::kNoMultitask:
      return "no_multitask";
  }
  return "?";
}

Technique parse_technique(std::string_view name) {
  for (auto t : {Technique::kFull, Technique::kNoAugmentation, Technique::kNoToi,
                 Technique::kNoEndToEnd, Technique::kNoMultitask}) {
    if (to_string(t) == name) return t;
  }
  throw DataError("unknown technique '" + std::string(name) + "'");
}

model::TrainConfig apply_technique(model::TrainConfig config, Technique technique) {
  switch (technique) {
    case Technique::kFull:
      break;
    case Technique::kNoAugmentation:
      config.use_augmentation = false;
      break;
    case Technique::kNoToi:
      config.use_toi = false;
      break;
    case Technique::kNoEndToEnd:
      config.end_to_end = false;
      break;
    case Technique::kNoMultitask:
      config.use_multitask = false;
      break;
  }
  return config;
}

std::size_t GridSpec::row_count() const {
  return variants.size() * techniques.size() * modes.size() * seeds.size();
}

std::string GridSpec::to_json() const {
  nlohmann::ordered_json j;
  j["variants"] = nlohmann::ordered_json::array();
  for (auto v : variants) j["variants"].push_back(std::string(model::to_string(v)));
  j["techniques"] = nlohmann::ordered_json::array();
  for (auto t : techniques) j["techniques"].push_back(std::string(to_string(t)));
  j["modes"] = nlohmann::ordered_json::array();
  for (auto m : modes) j["modes"].push_back(std::string(memory::to_string(m)));
  j["seeds"] = seeds;
  j["init_from_visual"] = init_from_visual;
  j["train"] = nlohmann::ordered_json::parse(base.to_json());
  return j.dump(2) + "\n";
}

GridSpec GridSpec::parse(std::string_view text) {
  GridSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("variants")) {
      spec.variants.clear();
      for (const auto& v : j.at("variants")) {
        spec.variants.push_back(model::parse_variant(v.get<std::string>()));
      }
    }
    if (j.contains("techniques")) {
      spec.techniques.clear();
      for (const auto& t : j.at("techniques")) {
        spec.techniques.push_back(parse_technique(t.get<std::string>()));
      }
    }
    if (j.contains("modes")) {
      spec.modes.clear();
      for (const auto& m : j.at("modes")) {
        spec.modes.push_back(memory::parse_memory_mode(m.get<std::string>()));
      }
    }
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    spec.init_from_visual = j.value("init_from_visual", spec.init_from_visual);
    if (j.contains("train")) spec.base = model::TrainConfig::from_json(j.at("train").dump());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ablation config: ") + e.what());
  }
  if (spec.row_count() == 0) throw DataError("ablation grid is empty");
  return spec;
}

std::vector<SummaryRow> summarize(const std::vector<GridRow>& rows) {
  std::vector<SummaryRow> out;
  std::vector<std::vector<const GridRow*>> groups;
  for (const auto& row : rows) {
    std::size_t g = 0;
    for (; g < out.size(); ++g) {
      if (out[g].variant == row.variant && out[g].technique == row.technique &&
          out[g].mode == row.mode) {
        break;
      }
    }
    if (g == out.size()) {
      out.push_back({row.variant, row.technique, row.mode});
      groups.emplace_back();
    }
    groups[g].push_back(&row);
  }
  auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  };
  for (std::size_t g = 0; g < out.size(); ++g) {
    std::vector<double> f1, cons;
    for (const auto* r : groups[g]) {
      f1.push_back(r->macro_f1);
      cons.push_back(r->consistency);
    }
    out[g].runs = f1.size();
    stats(f1, out[g].macro_f1_mean, out[g].macro_f1_sd);
    stats(cons, out[g].consistency_mean, out[g].consistency_sd);
  }
  return out;
}

std::string rows_csv(const std::vector<GridRow>& rows) {
  std::ostringstream os;
  os << "variant,technique,mode,seed,macro_f1,consistency,val_macro_f1,best_epoch,train_seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%llu,%.6f,%.6f,%.6f,%d,%.2f\n",
                  std::string(model::to_string(r.variant)).c_str(),
                  std::string(to_string(r.technique)).c_str(),
                  std::string(memory::to_string(r.mode)).c_str(),
                  static_cast<unsigned long long>(r.seed), r.macro_f1, r.consistency,
                  r.val_macro_f1, r.best_epoch, r.train_seconds);
    os << buf;
  }
  return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& summary) {
  std::ostringstream os;
  os << "variant,technique,mode,runs,macro_f1_mean,macro_f1_sd,consistency_mean,consistency_sd\n";
  char buf[256];
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%zu,%.6f,%.6f,%.6f,%.6f\n",
                  std::string(model::to_string(s.variant)).c_str(),
                  std::string(to_string(s.technique)).c_str(),
                  std::string(memory::to_string(s.mode)).c_str(), s.runs, s.macro_f1_mean,
                  s.macro_f1_sd, s.consistency_mean, s.consistency_sd);
    os << buf;
  }
  return os.str();
}

std::string summary_table(const std::vector<SummaryRow>& summary, double gt_consistency) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-8s %-16s %-10s %4s  %-17s  %-17s\n", "variant", "technique",
                "mode", "runs", "macro-F1", "consistency");
  os << buf;
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof(buf), "%-8s %-16s %-10s %4zu  %.4f +- %.4f  %.4f +- %.4f\n",
                  std::string(model::to_string(s.variant)).c_str(),
                  std::string(to_string(s.technique)).c_str(),
                  std::string(memory::to_string(s.mode)).c_str(), s.runs, s.macro_f1_mean,
                  s.macro_f1_sd, s.consistency_mean, s.consistency_sd);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "ground-truth consistency: %.4f\n", gt_consistency);
  os << buf;
  return os.str();
}

std::string results_json(const std::vector<GridRow>& rows, const std::vector<SummaryRow>& summary,
                         double gt_consistency) {
  nlohmann::ordered_json j;
  j["gt_consistency"] = gt_consistency;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"variant", model::to_string(r.variant)},
                         {"technique", to_string(r.technique)},
                         {"mode", memory::to_string(r.mode)},
                         {"seed", r.seed},
                         {"macro_f1", r.macro_f1},
                         {"consistency", r.consistency},
                         {"val_macro_f1", r.val_macro_f1},
                         {"best_epoch", r.best_epoch},
                         {"train_seconds", r.train_seconds}});
  }
  j["summary"] = nlohmann::ordered_json::array();
  for (const auto& s : summary) {
    j["summary"].push_back({{"variant", model::to_string(s.variant)},
                            {"technique", to_string(s.technique)},
                            {"mode", memory::to_string(s.mode)},
                            {"runs", s.runs},
                            {"macro_f1_mean", s.macro_f1_mean},
                            {"macro_f1_sd", s.macro_f1_sd},
                            {"consistency_mean", s.consistency_mean},
                            {"consistency_sd", s.consistency_sd}});
  }
  return j.dump(2) + "\n";
}

AblationRunner::AblationRunner(std::vector<sg::Recording> train, std::vector<sg::Recording> val,
                               std::vector<sg::Recording> test, sg::Vocabulary vocab)
    : train_(std::move(train)), val_(std::move(val)), test_(std::move(test)),
      vocab_(std::move(vocab)) {
  if (train_.empty() || test_.empty()) throw DataError("ablation needs train and test recordings");
}

double AblationRunner::gt_consistency() const {
  std::vector<std::vector<sg::SceneGraph>> gts;
  for (const auto& rec : test_) gts.push_back(rec.graphs());
  return consistency(gts, vocab_);
}

GridRow AblationRunner::score(const model::SceneGraphModel& model,
                              const memory::MemoryConfig& memory) const {
  std::vector<std::vector<sg::SceneGraph>> preds, gts;
  for (const auto& rec : test_) {
    preds.push_back(model::infer_sequence(rec, model, memory));
    gts.push_back(rec.graphs());
  }
  GridRow row;
  row.macro_f1 = macro_f1(preds, gts, vocab_).macro_f1;
  row.consistency = consistency(preds, vocab_);
  return row;
}

const model::SceneGraphModel& AblationRunner::visual_model(const model::TrainConfig& base,
                                                           std::uint64_t seed) {
  model::TrainConfig cfg = base;
  cfg.variant = model::Variant::kVisualOnly;
  cfg.seed = seed;
  cfg.init_from.clear();
  const std::string key = cfg.to_json();
  auto it = visual_models_.find(key);
  if (it == visual_models_.end()) {
    spdlog::info("training visual-only model (seed {})", seed);
    auto result = model::train(train_, val_, vocab_, cfg);
    ++trained_;
    it = visual_models_
             .emplace(key, std::make_unique<model::SceneGraphModel>(std::move(result.model)))
             .first;
  }
  return *it->second;
}

std::vector<GridRow> AblationRunner::run(const GridSpec& spec, const Progress& progress) {
  std::vector<GridRow> rows;
  for (const auto variant : spec.variants) {
    for (const auto technique : spec.techniques) {
      for (const auto mode : spec.modes) {
        for (const auto seed : spec.seeds) {
          model::TrainConfig cfg = apply_technique(spec.base, technique);
          cfg.variant = variant;
          cfg.memory.mode = mode;
          cfg.seed = seed;
          const bool visual = variant == model::Variant::kVisualOnly;
          // The visual-only model ignores memory mode and the memory techniques.
          const std::string key =
              visual ? "visual|" + std::to_string(seed) + "|" + spec.base.to_json()
                     : cfg.to_json() + (spec.init_from_visual ? "|init" : "");
          auto cached = cells_.find(key);
          GridRow row;
          if (cached != cells_.end()) {
            row = cached->second;
          } else {
            const auto started = std::chrono::steady_clock::now();
            if (visual) {
              const auto& vm = visual_model(spec.base, seed);
              row = score(vm, cfg.memory);
            } else {
              const model::SceneGraphModel* init =
                  spec.init_from_visual ? &visual_model(spec.base, seed) : nullptr;
              spdlog::info("training {} / {} / {} (seed {})", model::to_string(variant),
                           to_string(technique), memory::to_string(mode), seed);
              auto result = model::train(train_, val_, vocab_, cfg, init);
              ++trained_;
              row = score(result.model, cfg.memory);
              row.val_macro_f1 = result.best_val_macro_f1;
              row.best_epoch = result.best_epoch;
            }
            row.train_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            cells_[key] = row;
          }
          row.variant = variant;
          row.technique = technique;
          row.mode = mode;
          row.seed = seed;
          if (progress) progress(row);
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

}  // namespace memsg::eval
