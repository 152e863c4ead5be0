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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "memsg/encoders/fusion.hpp"
#include "memsg/encoders/graph_encoder.hpp"
#include "memsg/eval/metrics.hpp"
#include "memsg/memory/memory.hpp"
#include "memsg/model/infer.hpp"
#include "memsg/model/train.hpp"
#include "memsg/num/ops.hpp"
#include "memsg/synth/generator.hpp"
#include "memsg/synth/phase_model.hpp"

namespace {

using namespace memsg;

const sg::Vocabulary& vocab() {
  static const auto v = sg::Vocabulary::default_vocabulary();
  return v;
}

const sg::Recording& recording() {
  static const auto rec =
      synth::generate_recording(synth::default_scenario(), vocab(), 7, "bench").recording;
  return rec;
}

num::Tensor random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  return num::init::normal({rows, cols}, 1.0, rng);
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const auto a = random_matrix(n, n, rng);
  const auto b = random_matrix(n, n, rng);
  num::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(num::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(16)->Arg(32)->Arg(64);

encoders::EncoderConfig encoder_config(std::size_t d) {
  encoders::EncoderConfig c;
  c.hidden_dim = d;
  return c;
}

void BM_EncodeGraph(benchmark::State& state) {
  num::ParamStore store;
  std::mt19937_64 rng(2);
  const encoders::GraphEncoder encoder(store, encoder_config(static_cast<std::size_t>(state.range(0))),
                                       vocab().num_entity_classes(), vocab().num_predicates(), rng);
  const auto& graph = recording().timepoints.front().graph;
  num::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(encoder.encode(graph));
}
BENCHMARK(BM_EncodeGraph)->Arg(16)->Arg(32);

void BM_Fuse(benchmark::State& state) {
  const std::size_t d = 32;
  const auto entries = static_cast<int>(state.range(0));
  num::ParamStore store;
  std::mt19937_64 rng(3);
  const encoders::MemoryFusion fusion(store, encoder_config(d), rng);
  const auto features = random_matrix(static_cast<std::size_t>(entries), d, rng);
  std::vector<std::vector<encoders::FusionEntry>> windows(1);
  for (int i = 0; i < entries; ++i) windows[0].push_back({i, i + 1});
  num::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(fusion.fuse(features, windows, true));
}
BENCHMARK(BM_Fuse)->Arg(4)->Arg(16)->Arg(64);

void BM_TrainStep(benchmark::State& state) {
  model::ModelConfig mc;
  mc.encoder = encoder_config(16);
  mc.feature_dim = recording().feature_dim();
  mc.num_entity_classes = vocab().num_entity_classes();
  mc.num_predicates = vocab().num_predicates();
  mc.none_index = vocab().none_index();
  mc.memory.mode = memory::MemoryMode::kLongShort;
  model::SceneGraphModel m(mc);
  const auto graphs = recording().graphs();
  std::vector<model::Sample> samples;
  for (int t = 10; t < 18; ++t) {
    samples.push_back({&recording(), t,
                       memory::build_window(std::span<const sg::SceneGraph>(graphs), mc.memory, t)});
  }
  for (auto _ : state) {
    m.params().zero_grad();
    const auto loss = model::batch_loss(m, samples, vocab(), 0.5);
    num::backward(loss);
    num::adam_step(m.params(), {});
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_MacroF1(benchmark::State& state) {
  const auto graphs = recording().graphs();
  for (auto _ : state) benchmark::DoNotOptimize(eval::macro_f1(graphs, graphs, vocab()));
}
BENCHMARK(BM_MacroF1);

void BM_Consistency(benchmark::State& state) {
  const auto graphs = recording().graphs();
  for (auto _ : state) benchmark::DoNotOptimize(eval::consistency(graphs, vocab()));
}
BENCHMARK(BM_Consistency);

}  // namespace
BENCHMARK_MAIN();
