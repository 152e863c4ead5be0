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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "../common/metric_fixtures.hpp"
#include "memsg/error.hpp"
#include "memsg/eval/ablation.hpp"
#include "memsg/eval/metrics.hpp"
#include "memsg/eval/report.hpp"
#include "memsg/sg/scene_graph.hpp"
#include "test_support.hpp"

namespace memsg {
namespace {

using testing::or_graph;
using testing::pred;
using testing::vocab;

std::set<int> excluded_ids(const std::set<std::string>& names) {
  std::set<int> out;
  for (const auto& n : names) out.insert(vocab().predicate(n));
  return out;
}

TEST(MacroF1, HandScoredFixtures) {
  const auto cases = fixtures::f1_cases(vocab());
  ASSERT_GE(cases.size(), 10u);
  for (const auto& c : cases) {
    const auto r = eval::macro_f1(c.preds, c.gts, vocab(), c.include_none);
    EXPECT_NEAR(r.macro_f1, c.expected, 1e-12) << c.name;
  }
}

TEST(MacroF1, PerClassScoresOfConfusionCase) {
  const auto c = fixtures::f1_cases(vocab())[2];
  const auto r = eval::macro_f1(c.preds, c.gts, vocab());
  const auto& drilling = r.per_class[pred("drilling")];
  EXPECT_EQ(drilling.true_positive, 1u);
  EXPECT_EQ(drilling.predicted, 2u);
  EXPECT_EQ(drilling.support, 1u);
  EXPECT_NEAR(drilling.f1, 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(drilling.included);
  EXPECT_EQ(r.per_class[pred("sawing")].f1, 0.0);
  EXPECT_FALSE(r.per_class[vocab().none_index()].included);
  EXPECT_FALSE(r.per_class[pred("hammering")].included);
  EXPECT_EQ(r.included_classes, (std::vector<int>{pred("drilling"), pred("sawing")}));
}

TEST(MacroF1, ScoresStayInUnitInterval) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> p(0, static_cast<int>(vocab().num_predicates()) - 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<sg::SceneGraph> a, b;
    for (int t = 0; t < 4; ++t) {
      sg::SceneGraph ga = or_graph(), gb = or_graph();
      for (int s = 0; s < 4; ++s)
        for (int o = 0; o < 4; ++o) {
          if (s == o) continue;
          if (int q = p(rng); q != vocab().none_index()) ga.relations.push_back({s, q, o});
          if (int q = p(rng); q != vocab().none_index()) gb.relations.push_back({s, q, o});
        }
      a.push_back(ga);
      b.push_back(gb);
    }
    for (bool none : {false, true}) {
      const auto r = eval::macro_f1(a, b, vocab(), none);
      EXPECT_GE(r.macro_f1, 0.0);
      EXPECT_LE(r.macro_f1, 1.0);
      double mean = 0.0;
      for (int k : r.included_classes) mean += r.per_class[k].f1;
      mean /= static_cast<double>(r.included_classes.size());
      EXPECT_NEAR(r.macro_f1, mean, 1e-12);
    }
  }
}

TEST(MacroF1, RejectsMisalignment) {
  const std::vector<sg::SceneGraph> one{or_graph()};
  const std::vector<sg::SceneGraph> two{or_graph(), or_graph()};
  EXPECT_THROW(eval::macro_f1(one, two, vocab()), DataError);
  auto other = or_graph();
  other.entities.pop_back();
  const std::vector<sg::SceneGraph> mismatched{other};
  EXPECT_THROW(eval::macro_f1(one, mismatched, vocab()), DataError);
}

TEST(MacroF1, PoolsRecordings) {
  const auto c = fixtures::f1_cases(vocab())[2];
  // Splitting the two timepoints across recordings pools the same confusion.
  const std::vector<std::vector<sg::SceneGraph>> preds{{c.preds[0]}, {c.preds[1]}};
  const std::vector<std::vector<sg::SceneGraph>> gts{{c.gts[0]}, {c.gts[1]}};
  EXPECT_NEAR(eval::macro_f1(preds, gts, vocab()).macro_f1, 1.0 / 3.0, 1e-12);
}

TEST(Consistency, HandScoredFixtures) {
  const auto cases = fixtures::consistency_cases(vocab());
  for (const auto& c : cases) {
    EXPECT_NEAR(eval::consistency(c.graphs, vocab(), excluded_ids(c.excluded)), c.expected, 1e-12)
        << c.name;
  }
}

TEST(Consistency, RequiresTwoGraphs) {
  const std::vector<sg::SceneGraph> one{or_graph()};
  EXPECT_THROW(eval::consistency(one, vocab()), DataError);
  const std::vector<std::vector<sg::SceneGraph>> seqs{one, one};
  EXPECT_THROW(eval::consistency(seqs, vocab()), DataError);
}

std::vector<sg::SceneGraph> random_sequence(std::mt19937_64& rng, int length) {
  std::uniform_int_distribution<int> p(0, static_cast<int>(vocab().num_predicates()) - 1);
  std::bernoulli_distribution edge(0.25);
  std::vector<sg::SceneGraph> seq;
  for (int t = 0; t < length; ++t) {
    auto g = or_graph();
    for (int s = 0; s < 4; ++s)
      for (int o = 0; o < 4; ++o)
        if (s != o && edge(rng))
          if (int q = p(rng); q != vocab().none_index()) g.relations.push_back({s, q, o});
    seq.push_back(g);
  }
  return seq;
}

TEST(Consistency, InvariantToEntityRelabeling) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto seq = random_sequence(rng, 6);
    std::vector<int> perm{10, 20, 30, 40};
    std::shuffle(perm.begin(), perm.end(), rng);
    auto relabeled = seq;
    for (auto& g : relabeled) {
      for (auto& e : g.entities) e.id = perm[e.id];
      for (auto& r : g.relations) {
        r.subject = perm[r.subject];
        r.object = perm[r.object];
      }
    }
    EXPECT_EQ(eval::consistency(seq, vocab()), eval::consistency(relabeled, vocab()));
  }
}

TEST(Consistency, AddingPreviousPredicatesRaisesPairIou) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = random_sequence(rng, 8);
    const std::size_t t = 1 + static_cast<std::size_t>(trial) % (seq.size() - 1);
    auto merged = seq[t];
    for (const auto& r : seq[t - 1].relations) merged.relations.push_back(r);
    std::sort(merged.relations.begin(), merged.relations.end());
    merged.relations.erase(std::unique(merged.relations.begin(), merged.relations.end()),
                           merged.relations.end());
    const auto prev = sg::predicate_set(seq[t - 1], vocab());
    EXPECT_GE(eval::set_iou(prev, sg::predicate_set(merged, vocab())) + 1e-12,
              eval::set_iou(prev, sg::predicate_set(seq[t], vocab())));
  }
}

TEST(Consistency, SmoothingTowardEarlierGraphsIsMonotone) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = random_sequence(rng, 7);
    double last = eval::consistency(seq, vocab());
    // Hold the graph at `anchor` for the rest of the sequence, moving the
    // anchor earlier each round.
    for (std::size_t k = 1; k < seq.size(); ++k) {
      const std::size_t anchor = seq.size() - 1 - k;
      auto smoothed = seq;
      for (std::size_t t = anchor + 1; t < seq.size(); ++t) smoothed[t] = seq[anchor];
      const double now = eval::consistency(smoothed, vocab());
      EXPECT_GE(now + 1e-12, last) << "trial " << trial << " k " << k;
      last = now;
    }
    EXPECT_EQ(last, 1.0);
  }
}

TEST(Report, JsonAndFingerprint) {
  const auto c = fixtures::f1_cases(vocab())[2];
  const std::vector<std::vector<sg::SceneGraph>> preds{c.preds};
  const std::vector<std::vector<sg::SceneGraph>> gts{c.gts};
  const auto report = eval::evaluate(preds, gts, vocab(), {});
  EXPECT_NEAR(report.f1.macro_f1, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(report.consistency, 1.0);  // {drilling} twice
  ASSERT_TRUE(report.gt_consistency.has_value());
  EXPECT_EQ(*report.gt_consistency, 0.0);
  const auto json = report.to_json(vocab());
  EXPECT_NE(json.find("\"macro_f1\""), std::string::npos);
  EXPECT_NE(json.find("\"per_class\""), std::string::npos);
  EXPECT_EQ(eval::fingerprint("abc").size(), 16u);
  EXPECT_EQ(eval::fingerprint("abc"), eval::fingerprint("abc"));
  EXPECT_NE(eval::fingerprint("abc"), eval::fingerprint("abd"));
}

TEST(Ablation, GridRowCountAndParse) {
  eval::GridSpec spec;
  EXPECT_EQ(spec.row_count(), 3u * 5u * 4u * 3u);
  const auto parsed = eval::GridSpec::parse(R"({
    "variants": ["visual", "memory"], "techniques": ["full", "no_toi"],
    "modes": ["short", "longshort"], "seeds": [4, 5], "train": {"epochs": 3, "lambda": 0.2}})");
  EXPECT_EQ(parsed.row_count(), 2u * 2u * 2u * 2u);
  EXPECT_EQ(parsed.base.epochs, 3);
  EXPECT_EQ(parsed.base.lambda, 0.2);
  const auto again = eval::GridSpec::parse(parsed.to_json());
  EXPECT_EQ(again.to_json(), parsed.to_json());
  EXPECT_THROW(eval::GridSpec::parse(R"({"techniques": ["bogus"]})"), DataError);
  EXPECT_THROW(eval::GridSpec::parse(R"({"seeds": []})"), DataError);
}

TEST(Ablation, TechniquesDisableOneThing) {
  const model::TrainConfig base;
  EXPECT_FALSE(eval::apply_technique(base, eval::Technique::kNoAugmentation).use_augmentation);
  EXPECT_FALSE(eval::apply_technique(base, eval::Technique::kNoToi).use_toi);
  EXPECT_FALSE(eval::apply_technique(base, eval::Technique::kNoEndToEnd).end_to_end);
  EXPECT_FALSE(eval::apply_technique(base, eval::Technique::kNoMultitask).use_multitask);
  EXPECT_EQ(eval::apply_technique(base, eval::Technique::kFull).to_json(), base.to_json());
  for (auto t : {eval::Technique::kFull, eval::Technique::kNoAugmentation, eval::Technique::kNoToi,
                 eval::Technique::kNoEndToEnd, eval::Technique::kNoMultitask})
    EXPECT_EQ(eval::parse_technique(eval::to_string(t)), t);
}

TEST(Ablation, SummaryMeanAndSampleSd) {
  std::vector<eval::GridRow> rows(3);
  rows[0].macro_f1 = 0.5;
  rows[1].macro_f1 = 0.7;
  rows[2].macro_f1 = 0.9;
  for (std::size_t i = 0; i < 3; ++i) {
    rows[i].seed = i;
    rows[i].consistency = 0.8;
  }
  const auto s = eval::summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].runs, 3u);
  EXPECT_NEAR(s[0].macro_f1_mean, 0.7, 1e-12);
  EXPECT_NEAR(s[0].macro_f1_sd, 0.2, 1e-12);
  EXPECT_NEAR(s[0].consistency_sd, 0.0, 1e-12);
  const auto csv = eval::rows_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_NE(eval::summary_table(s, 0.9).find("memory"), std::string::npos);
}

TEST(Ablation, VisualOnlyIgnoresMemoryMode) {
  std::vector<sg::Recording> train{testing::small_recording(1), testing::small_recording(2)};
  std::vector<sg::Recording> val{testing::small_recording(3)};
  std::vector<sg::Recording> test{testing::small_recording(4)};
  eval::AblationRunner runner(train, val, test, vocab());
  eval::GridSpec spec;
  spec.variants = {model::Variant::kVisualOnly};
  spec.techniques = {eval::Technique::kFull};
  spec.seeds = {0};
  spec.base.epochs = 2;
  spec.base.encoder.hidden_dim = 16;
  spec.base.encoder.ffn_multiplier = 2;
  const auto rows = runner.run(spec);
  ASSERT_EQ(rows.size(), spec.row_count());
  for (const auto& r : rows) {
    EXPECT_EQ(r.macro_f1, rows[0].macro_f1);
    EXPECT_EQ(r.consistency, rows[0].consistency);
  }
  EXPECT_EQ(runner.trained_models(), 1u);
}

}  // namespace
}  // namespace memsg
