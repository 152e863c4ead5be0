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
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "memsg/memory/memory.hpp"
#include "memsg/model/model.hpp"
#include "memsg/model/train.hpp"
#include "memsg/sg/recording.hpp"
#include "memsg/sg/vocabulary.hpp"

namespace memsg::eval {

enum class Technique { kFull, kNoAugmentation, kNoToi, kNoEndToEnd, kNoMultitask };

std::string_view to_string(Technique technique);
Technique parse_technique(std::string_view name);

// Base config with one technique disabled.
model::TrainConfig apply_technique(model::TrainConfig config, Technique technique);

struct GridSpec {
  std::vector<model::Variant> variants{model::Variant::kVisualOnly, model::Variant::kLbt,
                                       model::Variant::kMemory};
  std::vector<Technique> techniques{Technique::kFull, Technique::kNoAugmentation,
                                    Technique::kNoToi, Technique::kNoEndToEnd,
                                    Technique::kNoMultitask};
  std::vector<memory::MemoryMode> modes{memory::MemoryMode::kAll, memory::MemoryMode::kShort,
                                        memory::MemoryMode::kLong,
                                        memory::MemoryMode::kLongShort};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  model::TrainConfig base;
  // Start LBT and memory models from the visual-only model of the same seed.
  bool init_from_visual = true;

  std::size_t row_count() const;
  std::string to_json() const;
  // Keys absent from the text keep their defaults; "train" holds TrainConfig keys.
  static GridSpec parse(std::string_view text);
};

struct GridRow {
  model::Variant variant = model::Variant::kMemory;
  Technique technique = Technique::kFull;
  memory::MemoryMode mode = memory::MemoryMode::kLongShort;
  std::uint64_t seed = 0;
  double macro_f1 = 0.0;
  double consistency = 0.0;
  double val_macro_f1 = 0.0;
  int best_epoch = 0;
  double train_seconds = 0.0;
};

struct SummaryRow {
  model::Variant variant = model::Variant::kMemory;
  Technique technique = Technique::kFull;
  memory::MemoryMode mode = memory::MemoryMode::kLongShort;
  std::size_t runs = 0;
  double macro_f1_mean = 0.0;
  double macro_f1_sd = 0.0;
  double consistency_mean = 0.0;
  double consistency_sd = 0.0;
};

// Grouped over seeds, in first-appearance order; sd is the sample standard
// deviation (0 for a single run).
std::vector<SummaryRow> summarize(const std::vector<GridRow>& rows);

std::string rows_csv(const std::vector<GridRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& summary);
std::string summary_table(const std::vector<SummaryRow>& summary, double gt_consistency);
std::string results_json(const std::vector<GridRow>& rows, const std::vector<SummaryRow>& summary,
                         double gt_consistency);

// Trains and scores grid cells on fixed splits. Results are cached per cell,
// and visual-only models per seed, so overlapping grids reuse work.
class AblationRunner {
 public:
  using Progress = std::function<void(const GridRow&)>;

  AblationRunner(std::vector<sg::Recording> train, std::vector<sg::Recording> val,
                 std::vector<sg::Recording> test, sg::Vocabulary vocab);

  std::vector<GridRow> run(const GridSpec& spec, const Progress& progress = {});

  // Consistency of the test ground truth.
  double gt_consistency() const;
  std::size_t trained_models() const { return trained_; }

 private:
  const model::SceneGraphModel& visual_model(const model::TrainConfig& base, std::uint64_t seed);
  GridRow score(const model::SceneGraphModel& model, const memory::MemoryConfig& memory) const;

  std::vector<sg::Recording> train_, val_, test_;
  sg::Vocabulary vocab_;
  std::map<std::string, std::unique_ptr<model::SceneGraphModel>> visual_models_;
  std::map<std::string, GridRow> cells_;
  std::size_t trained_ = 0;
};

}  // namespace memsg::eval
