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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memsg/encoders/config.hpp"
#include "memsg/memory/memory.hpp"
#include "memsg/model/model.hpp"
#include "memsg/num/param_store.hpp"
#include "memsg/sg/recording.hpp"
#include "memsg/sg/vocabulary.hpp"

namespace memsg::model {

struct TrainConfig {
  Variant variant = Variant::kMemory;
  memory::MemoryConfig memory;
  memory::AugmentationConfig augmentation;
  encoders::EncoderConfig encoder;
  num::AdamConfig adam;
  bool use_toi = true;
  bool use_multitask = true;
  bool use_augmentation = true;
  bool end_to_end = true;
  double lambda = 0.5;
  int epochs = 60;
  int patience = 10;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  std::string init_from;  // checkpoint path, empty for none

  void validate() const;
  std::string to_json() const;
  // Keys absent from `text` keep the values of `base`.
  static TrainConfig from_json(std::string_view text, const TrainConfig& base);
  static TrainConfig from_json(std::string_view text);
};

struct EpochLog {
  int epoch = 0;
  std::size_t steps = 0;
  double train_loss = 0.0;
  double val_macro_f1 = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  SceneGraphModel model;
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_macro_f1 = 0.0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Teacher-forced training on ground-truth memory windows. Minibatches are
// runs of consecutive timepoints from one recording (so windows share most
// of their graphs); runs are shuffled every epoch. With a validation set the
// best epoch by predicted-memory macro F1 is restored and training stops after
// `patience` epochs without improvement. `init` (or cfg.init_from) supplies
// starting weights for every parameter it shares with the new model.
TrainResult train(std::span<const sg::Recording> train_set, std::span<const sg::Recording> val_set,
                  const sg::Vocabulary& vocab, const TrainConfig& cfg,
                  const SceneGraphModel* init = nullptr, const EpochCallback& on_epoch = {});

// Mean loss over `samples` with the given config's loss weighting; used by
// tests and the training loop alike.
num::Tensor batch_loss(const SceneGraphModel& model, std::span<const Sample> samples,
                       const sg::Vocabulary& vocab, double lambda);

// Predicted-memory macro F1 pooled over recordings.
double evaluate_macro_f1(std::span<const sg::Recording> recordings, const SceneGraphModel& model,
                         const memory::MemoryConfig& memory, const sg::Vocabulary& vocab);

}  // namespace memsg::model
