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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. `memsg_acceptance 2 4` runs a subset.

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "common/memory_oracle.hpp"
#include "common/metric_fixtures.hpp"
#include "memsg/encoders/fusion.hpp"
#include "memsg/encoders/graph_encoder.hpp"
#include "memsg/eval/ablation.hpp"
#include "memsg/eval/metrics.hpp"
#include "memsg/memory/memory.hpp"
#include "memsg/model/infer.hpp"
#include "memsg/model/model.hpp"
#include "memsg/model/train.hpp"
#include "memsg/num/grad_check.hpp"
#include "memsg/synth/generator.hpp"
#include "memsg/synth/phase_model.hpp"

namespace {

using namespace memsg;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

const sg::Vocabulary& vocab() {
  static const sg::Vocabulary v = sg::Vocabulary::default_vocabulary();
  return v;
}

std::string format_value(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Scenario trimmed to a few fixed-length phases for the structural checks.
synth::PhaseModel small_scenario(int k, std::size_t phases) {
  auto m = synth::default_scenario();
  m.phases.resize(phases);
  m.phases.back().successors.clear();
  for (auto& p : m.phases) p.min_duration = p.max_duration = k;
  m.max_entities = m.min_entities;
  return m;
}

sg::Recording small_recording(std::uint64_t seed, int k = 6, std::size_t phases = 3) {
  return synth::generate_recording(small_scenario(k, phases), vocab(), seed, "take").recording;
}

model::ModelConfig small_model(std::uint64_t seed, std::size_t d) {
  model::ModelConfig c;
  c.encoder.hidden_dim = d;
  c.encoder.graph_heads = 2;
  c.encoder.fusion_heads = 2;
  c.encoder.ffn_multiplier = 2;
  c.feature_dim = synth::default_scenario().feature_dim;
  c.num_entity_classes = vocab().num_entity_classes();
  c.num_predicates = vocab().num_predicates();
  c.none_index = vocab().none_index();
  c.variant = model::Variant::kMemory;
  c.init_seed = seed;
  return c;
}

model::TrainConfig small_train(std::uint64_t seed) {
  model::TrainConfig c;
  c.encoder.hidden_dim = 16;
  c.encoder.graph_heads = 2;
  c.encoder.fusion_heads = 2;
  c.encoder.ffn_multiplier = 2;
  c.epochs = 3;
  c.batch_size = 6;
  c.seed = seed;
  return c;
}

Outcome memory_oracle() {
  using memory::MemoryMode;
  std::size_t checked = 0;
  for (auto anchor : {memory::LongAnchor::kToi, memory::LongAnchor::kStart}) {
    for (auto mode : {MemoryMode::kAll, MemoryMode::kShort, MemoryMode::kLong, MemoryMode::kLongShort}) {
      for (int s = 1; s <= 10; ++s) {
        for (int t = 0; t <= 200; ++t) {
          const auto got = memory::select_memory_indices({mode, s, anchor}, t);
          if (std::set<int>(got.begin(), got.end()) != fixtures::brute_force(mode, s, t, anchor) ||
              !std::is_sorted(got.begin(), got.end()) ||
              std::adjacent_find(got.begin(), got.end()) != got.end()) {
            return {false, std::string(memory::to_string(mode)) + " S=" + std::to_string(s) +
                               " T=" + std::to_string(t) + " differs from the enumerator"};
          }
          ++checked;
        }
      }
      if (mode != MemoryMode::kLongShort) continue;
      for (int s = 1; s <= 10; ++s) {
        for (int t = 0; t <= 200; ++t) {
          const auto ls = memory::select_memory_indices({MemoryMode::kLongShort, s, anchor}, t);
          auto u = fixtures::brute_force(MemoryMode::kShort, s, t, anchor);
          const auto l = fixtures::brute_force(MemoryMode::kLong, s, t, anchor);
          u.insert(l.begin(), l.end());
          if (std::set<int>(ls.begin(), ls.end()) != u) {
            return {false, "LongShort != Short u Long at S=" + std::to_string(s) + " T=" + std::to_string(t)};
          }
        }
      }
    }
  }
  return {true, std::to_string(checked) + " (mode, anchor, S, T) cases match"};
}

Outcome metric_oracles() {
  std::size_t n = 0;
  double worst = 0.0;
  std::string failed;
  for (const auto& c : fixtures::f1_cases(vocab())) {
    const double got = eval::macro_f1(c.preds, c.gts, vocab(), c.include_none).macro_f1;
    worst = std::max(worst, std::abs(got - c.expected));
    if (std::abs(got - c.expected) > 1e-12) failed += " f1:" + c.name;
    ++n;
  }
  for (const auto& c : fixtures::consistency_cases(vocab())) {
    std::set<int> excluded;
    for (const auto& name : c.excluded) excluded.insert(vocab().predicate(name));
    const double got = eval::consistency(c.graphs, vocab(), excluded);
    worst = std::max(worst, std::abs(got - c.expected));
    if (std::abs(got - c.expected) > 1e-12) failed += " consistency:" + c.name;
    ++n;
  }
  if (!failed.empty()) return {false, "mismatched fixtures:" + failed};
  return {n >= 10, std::to_string(n) + " fixtures, max abs error " + format_value("%.2e", worst)};
}

Outcome gradient_check() {
  double worst = 0.0;
  std::string worst_where;
  std::size_t coords = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rec = small_recording(1000 + seed, 4, 3);
    model::SceneGraphModel m(small_model(seed, 8));
    const memory::MemoryConfig mem{memory::MemoryMode::kLongShort, 2, memory::LongAnchor::kToi};
    const auto graphs = rec.graphs();
    std::vector<model::Sample> samples;
    for (int t : {0, 3, 7, 11}) samples.push_back({&rec, t, memory::build_window(graphs, mem, t)});
    // One masked entry so the UNKNOWN token is on the path too.
    samples[2].window.entries[0].graph.reset();
    auto loss = [&] { return model::batch_loss(m, samples, vocab(), 0.5); };
    num::GradCheckOptions opts;
    opts.h = 1e-5;
    opts.coords_per_param = 4;
    opts.seed = seed;
    const auto r = num::grad_check(loss, m.params(), opts);
    coords += r.coordinates_checked;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_where = r.worst_parameter + "[" + std::to_string(r.worst_index) + "] seed " +
                    std::to_string(seed);
    }
  }
  return {worst < 1e-4, "max relative error " + format_value("%.2e", worst) + " at " + worst_where + " over " +
                            std::to_string(coords) + " coordinates, 20 seeds"};
}

Outcome structural_invariants() {
  std::vector<std::string> problems;
  // Graph encoder: entity order and ids do not matter.
  {
    std::mt19937_64 rng(3);
    num::ParamStore store;
    encoders::EncoderConfig cfg;
    cfg.hidden_dim = 16;
    cfg.graph_heads = 2;
    cfg.fusion_heads = 2;
    encoders::GraphEncoder enc(store, cfg, vocab().num_entity_classes(), vocab().num_predicates(), rng);
    encoders::MemoryFusion fusion(store, cfg, rng);
    double drift = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto rec = small_recording(seed);
      std::mt19937_64 perm_rng(seed);
      for (const auto& tp : rec.timepoints) {
        const auto& g = tp.graph;
        std::vector<int> ids;
        for (const auto& e : g.entities) ids.push_back(e.id + 50);
        std::shuffle(ids.begin(), ids.end(), perm_rng);
        std::map<int, int> relabel;
        for (std::size_t i = 0; i < g.entities.size(); ++i) relabel[g.entities[i].id] = ids[i];
        sg::SceneGraph h;
        for (const auto& e : g.entities) h.entities.push_back({relabel[e.id], e.class_index});
        for (const auto& r : g.relations)
          h.relations.push_back({relabel[r.subject], r.predicate, relabel[r.object]});
        std::shuffle(h.entities.begin(), h.entities.end(), perm_rng);
        std::shuffle(h.relations.begin(), h.relations.end(), perm_rng);
        const auto a = enc.encode(g);
        const auto b = enc.encode(h);
        for (std::size_t i = 0; i < a.size(); ++i) drift = std::max(drift, std::abs(a.at(i) - b.at(i)));
      }
    }
    if (!(drift < 1e-9)) problems.push_back("encoder drift " + format_value("%.2e", drift));

    // Fusion attention rows.
    std::normal_distribution<double> normal;
    std::vector<double> fv(12 * 16);
    for (auto& x : fv) x = normal(rng);
    const auto features = num::Tensor::from_data({12, 16}, fv);
    std::vector<std::vector<encoders::FusionEntry>> windows;
    for (int n = 1; n <= 12; ++n) {
      std::vector<encoders::FusionEntry> w;
      for (int i = 0; i < n; ++i)
        w.push_back({i % 5 == 4 ? encoders::FusionEntry::kUnknown : i, 1 + 3 * i});
      windows.push_back(w);
    }
    const auto res = fusion.fuse(features, windows, true, true);
    double row_err = 0.0;
    for (const auto& rec : res.attention)
      for (const auto& layer : rec.weights)
        for (const auto& head : layer) {
          double total = 0.0;
          for (double w : head) total += w;
          row_err = std::max(row_err, std::abs(total - 1.0));
        }
    if (!(row_err <= 1e-12)) problems.push_back("attention row error " + format_value("%.2e", row_err));
  }
  // Leakage and determinism on a briefly trained model.
  const std::vector<sg::Recording> train{small_recording(1), small_recording(2)};
  const auto cfg = small_train(11);
  const auto a = model::train(train, {}, vocab(), cfg);
  const auto b = model::train(train, {}, vocab(), cfg);
  if (!a.model.params().values_equal(b.model.params())) problems.push_back("training is not bit-reproducible");

  std::size_t leaks = 0;
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    auto rec = small_recording(seed);
    const auto clean = model::infer_sequence(rec, a.model, {});
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> p(0, static_cast<int>(vocab().num_predicates()) - 1);
    for (auto& tp : rec.timepoints) {
      tp.graph.relations.clear();
      for (const auto& s : tp.graph.entities)
        for (const auto& o : tp.graph.entities)
          if (s.id != o.id)
            if (int q = p(rng); q != vocab().none_index()) tp.graph.relations.push_back({s.id, q, o.id});
    }
    if (model::infer_sequence(rec, a.model, {}) != clean) ++leaks;
  }
  if (leaks > 0) problems.push_back(std::to_string(leaks) + " recordings changed under GT scrambling");

  if (problems.empty()) {
    return {true, "encoder drift < 1e-9, attention rows within 1e-12, no GT leakage, bit-identical training"};
  }
  std::string d;
  for (const auto& s : problems) d += (d.empty() ? "" : "; ") + s;
  return {false, d};
}

// Shared state for the two benchmark criteria.
struct BenchmarkRun {
  bool done = false;
  std::vector<eval::GridRow> rows;
  double gt_consistency = 0.0;
  double seconds = 0.0;
};

BenchmarkRun& benchmark_run() {
  static BenchmarkRun run;
  if (run.done) return run;
  const auto start = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / ("memsg_acceptance_" + std::to_string(std::random_device{}()));
  fs::remove_all(root);
  synth::make_benchmark(synth::default_scenario(), vocab(), 8, 1, 1, 1, root);
  auto data = synth::load_benchmark(root, vocab());
  fs::remove_all(root);
  eval::AblationRunner runner(std::move(data.train), std::move(data.val), std::move(data.test), vocab());

  eval::GridSpec spec;
  spec.modes = {memory::MemoryMode::kLongShort};
  spec.seeds = {0, 1, 2};
  spec.base.epochs = 30;
  spec.base.patience = 10;
  auto progress = [](const eval::GridRow& r) {
    std::printf("  %-6s %-15s seed %llu: macro-F1 %.4f consistency %.4f (%.0f s)\n",
                std::string(model::to_string(r.variant)).c_str(),
                std::string(eval::to_string(r.technique)).c_str(),
                static_cast<unsigned long long>(r.seed), r.macro_f1, r.consistency, r.train_seconds);
    std::fflush(stdout);
  };
  spec.variants = {model::Variant::kVisualOnly, model::Variant::kLbt};
  spec.techniques = {eval::Technique::kFull};
  run.rows = runner.run(spec, progress);
  spec.variants = {model::Variant::kMemory};
  spec.techniques = {eval::Technique::kFull, eval::Technique::kNoAugmentation, eval::Technique::kNoToi};
  const auto mem_rows = runner.run(spec, progress);
  run.rows.insert(run.rows.end(), mem_rows.begin(), mem_rows.end());
  run.gt_consistency = runner.gt_consistency();
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.done = true;
  return run;
}

std::pair<double, double> mean_of(const std::vector<eval::GridRow>& rows, model::Variant v,
                                  eval::Technique t) {
  double f1 = 0.0, cons = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.variant != v || r.technique != t) continue;
    f1 += r.macro_f1;
    cons += r.consistency;
    ++n;
  }
  return {n ? f1 / n : 0.0, n ? cons / n : 0.0};
}

Outcome main_comparison() {
  const auto& run = benchmark_run();
  const auto [vis_f1, vis_c] = mean_of(run.rows, model::Variant::kVisualOnly, eval::Technique::kFull);
  const auto [lbt_f1, lbt_c] = mean_of(run.rows, model::Variant::kLbt, eval::Technique::kFull);
  const auto [mem_f1, mem_c] = mean_of(run.rows, model::Variant::kMemory, eval::Technique::kFull);
  std::vector<std::string> failed;
  if (!(mem_f1 - vis_f1 >= 0.05)) failed.push_back("memory - visual F1 < 0.05");
  if (!(mem_f1 > lbt_f1)) failed.push_back("memory F1 <= LBT F1");
  if (!(mem_c - vis_c >= 0.02)) failed.push_back("memory - visual consistency < 0.02");
  if (!(mem_c <= run.gt_consistency)) failed.push_back("memory consistency > GT");
  if (!(run.seconds <= 1800.0)) failed.push_back("runtime over 30 min");
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "macro-F1 visual %.4f / lbt %.4f / memory %.4f; consistency visual %.4f / memory %.4f / "
                "GT %.4f; %.0f s",
                vis_f1, lbt_f1, mem_f1, vis_c, mem_c, run.gt_consistency, run.seconds);
  os << buf;
  for (const auto& f : failed) os << "; " << f;
  return {failed.empty(), os.str()};
}

Outcome technique_ablation() {
  const auto& run = benchmark_run();
  const double full = mean_of(run.rows, model::Variant::kMemory, eval::Technique::kFull).first;
  const double no_aug = mean_of(run.rows, model::Variant::kMemory, eval::Technique::kNoAugmentation).first;
  const double no_toi = mean_of(run.rows, model::Variant::kMemory, eval::Technique::kNoToi).first;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "seed-mean macro-F1 full %.4f, no augmentation %.4f, no ToI %.4f",
                full, no_aug, no_toi);
  std::string detail = buf;
  if (!(no_aug < full)) detail += "; augmentation does not help";
  if (!(no_toi < full)) detail += "; ToI ids do not help";
  return {no_aug < full && no_toi < full, detail};
}

Outcome generator_calibration() {
  const auto m = synth::default_scenario();
  std::vector<std::vector<sg::SceneGraph>> seqs;
  int shortest = 1 << 30;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = synth::generate_recording(m, vocab(), seed, "take");
    for (const auto& s : g.segments) shortest = std::min(shortest, s.length);
    if (seed < 50) seqs.push_back(g.recording.graphs());
  }
  const double c = eval::consistency(seqs, vocab());
  const bool ok = std::abs(c - 0.9) <= 0.05 && shortest > 5;
  return {ok, "GT consistency " + format_value("%.4f", c) + " over 50 recordings; shortest phase " +
                  std::to_string(shortest) + " timepoints over 200 recordings"};
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  struct Criterion {
    std::string name;
    std::function<Outcome()> check;
    double time_limit;  // seconds, 0 for none
  };
  const std::vector<Criterion> criteria{
      {"memory-mode oracle equivalence", memory_oracle, 5.0},
      {"metric oracles", metric_oracles, 1.0},
      {"gradient correctness", gradient_check, 120.0},
      {"structural invariants", structural_invariants, 0.0},
      {"memory vs visual-only and LBT", main_comparison, 0.0},
      {"augmentation and ToI ablation", technique_ablation, 0.0},
      {"generator calibration", generator_calibration, 0.0},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].time_limit > 0.0 && secs > criteria[i].time_limit) {
      out.pass = false;
      out.detail += "; over the " + format_value("%.0f", criteria[i].time_limit) + " s budget";
    }
    std::printf("%s %d %s (%.1f s): %s\n", out.pass ? "PASS" : "FAIL", id, criteria[i].name.c_str(),
                secs, out.detail.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
