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
#include <map>
#include <random>
#include <set>

#include "memsg/error.hpp"
#include "../common/memory_oracle.hpp"
#include "memsg/memory/memory.hpp"
#include "test_support.hpp"

namespace memsg {
namespace {

using memory::LongAnchor;
using memory::MemoryConfig;
using memory::MemoryMode;

using fixtures::brute_force;

std::vector<int> select(MemoryMode mode, int S, int T) {
  return memory::select_memory_indices({mode, S, LongAnchor::kToi}, T);
}

TEST(SelectMemoryIndices, Examples) {
  EXPECT_EQ(select(MemoryMode::kAll, 5, 4), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(select(MemoryMode::kShort, 5, 10), (std::vector<int>{5, 6, 7, 8, 9}));
  EXPECT_EQ(select(MemoryMode::kLongShort, 5, 12), (std::vector<int>{2, 7, 8, 9, 10, 11}));
  EXPECT_EQ(select(MemoryMode::kLong, 5, 12), (std::vector<int>{2, 7}));
  EXPECT_EQ(select(MemoryMode::kLong, 5, 10), (std::vector<int>{0, 5}));
  for (auto mode : {MemoryMode::kAll, MemoryMode::kShort, MemoryMode::kLong, MemoryMode::kLongShort}) {
    EXPECT_TRUE(select(mode, 5, 0).empty());
  }
}

TEST(SelectMemoryIndices, StartAnchoredLong) {
  EXPECT_EQ(memory::select_memory_indices({MemoryMode::kLong, 5, LongAnchor::kStart}, 12),
            (std::vector<int>{0, 5, 10}));
}

TEST(SelectMemoryIndices, MatchesBruteForceEverywhere) {
  for (auto anchor : {LongAnchor::kToi, LongAnchor::kStart}) {
    for (auto mode :
         {MemoryMode::kAll, MemoryMode::kShort, MemoryMode::kLong, MemoryMode::kLongShort}) {
      for (int S = 1; S <= 10; ++S) {
        for (int T = 0; T <= 200; ++T) {
          const auto got = memory::select_memory_indices({mode, S, anchor}, T);
          const auto want = brute_force(mode, S, T, anchor);
          ASSERT_EQ(std::set<int>(got.begin(), got.end()), want)
              << memory::to_string(mode) << " S=" << S << " T=" << T;
          ASSERT_TRUE(std::is_sorted(got.begin(), got.end()));
          ASSERT_EQ(got.size(), want.size());
        }
      }
    }
  }
}

TEST(SelectMemoryIndices, SetRelationsAndSizes) {
  for (int S = 1; S <= 10; ++S) {
    for (int T = 0; T <= 200; ++T) {
      const auto all = select(MemoryMode::kAll, S, T);
      const auto shrt = select(MemoryMode::kShort, S, T);
      const auto lng = select(MemoryMode::kLong, S, T);
      const auto ls = select(MemoryMode::kLongShort, S, T);
      const std::set<int> all_set(all.begin(), all.end());
      for (int t : shrt) ASSERT_TRUE(all_set.count(t));
      for (int t : lng) ASSERT_TRUE(all_set.count(t));
      std::set<int> u(shrt.begin(), shrt.end());
      u.insert(lng.begin(), lng.end());
      ASSERT_EQ(std::set<int>(ls.begin(), ls.end()), u);
      ASSERT_EQ(shrt.size(), static_cast<std::size_t>(std::min(S, T)));
      ASSERT_EQ(lng.size(), static_cast<std::size_t>(T / S));
      for (int t : ls) ASSERT_TRUE(t >= 0 && t < T);
    }
  }
}

TEST(MemoryMode, NamesRoundTrip) {
  for (auto mode : {MemoryMode::kAll, MemoryMode::kShort, MemoryMode::kLong, MemoryMode::kLongShort}) {
    EXPECT_EQ(memory::parse_memory_mode(memory::to_string(mode)), mode);
  }
  EXPECT_THROW(memory::parse_memory_mode("medium"), DataError);
  EXPECT_EQ(memory::parse_long_anchor("start"), LongAnchor::kStart);
}

std::vector<sg::SceneGraph> numbered_graphs(int n) {
  std::vector<sg::SceneGraph> graphs;
  for (int i = 0; i < n; ++i) {
    sg::SceneGraph g;
    g.entities = {{i, 0}};
    graphs.push_back(g);
  }
  return graphs;
}

TEST(BuildWindow, Examples) {
  const auto graphs = numbered_graphs(20);
  EXPECT_TRUE(memory::build_window(graphs, {}, 0).entries.empty());
  const auto w = memory::build_window(graphs, {MemoryMode::kShort, 5, LongAnchor::kToi}, 10);
  ASSERT_EQ(w.entries.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(w.entries[i].t, static_cast<int>(5 + i));
    EXPECT_EQ(w.entries[i].toi_id, static_cast<int>(5 - i));
    EXPECT_EQ(w.entries[i].graph, graphs[5 + i]);
  }
}

TEST(BuildWindow, MaxToiEqualsDistanceToEarliestEntry) {
  std::mt19937_64 rng(11);
  const auto graphs = numbered_graphs(150);
  std::map<int, sg::SceneGraph> by_t;
  for (int i = 0; i < 150; ++i) by_t[i] = graphs[i];
  for (int trial = 0; trial < 500; ++trial) {
    const auto mode = static_cast<MemoryMode>(rng() % 4);
    const int S = 1 + static_cast<int>(rng() % 10);
    const int T = static_cast<int>(rng() % 150);
    const MemoryConfig cfg{mode, S, LongAnchor::kToi};
    const auto w = memory::build_window(by_t, cfg, T);
    EXPECT_EQ(w, memory::build_window(graphs, cfg, T));
    if (w.entries.empty()) continue;
    const auto idx = memory::select_memory_indices(cfg, T);
    int max_toi = 0;
    for (std::size_t i = 0; i < w.entries.size(); ++i) {
      EXPECT_EQ(w.entries[i].toi_id, T - w.entries[i].t);
      if (i > 0) EXPECT_LT(w.entries[i - 1].t, w.entries[i].t);
      max_toi = std::max(max_toi, w.entries[i].toi_id);
    }
    EXPECT_EQ(max_toi, T - idx.front());
  }
}

TEST(BuildWindow, MissingGraphIsAnError) {
  std::map<int, sg::SceneGraph> graphs{{0, {}}, {2, {}}};
  EXPECT_THROW(memory::build_window(graphs, {MemoryMode::kAll, 5, LongAnchor::kToi}, 3), DataError);
}

memory::MemoryWindow window_of(int T) {
  return memory::build_window(numbered_graphs(T), {MemoryMode::kAll, 5, LongAnchor::kToi}, T);
}

TEST(AugmentWindow, ZeroProbabilityIsIdentity) {
  std::mt19937_64 rng(1);
  const auto w = window_of(12);
  memory::AugmentationConfig cfg;
  cfg.p_apply = 0.0;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(memory::augment_window(w, cfg, rng), w);
}

TEST(AugmentWindow, FullFractionMasksEverythingInShortOnlyWindow) {
  std::mt19937_64 rng(2);
  const auto w = window_of(4);  // toi ids 1..4, all <= boundary 5
  memory::AugmentationConfig cfg{1.0, 1.0, 1.0, 5, false};
  int full = 0;
  for (int i = 0; i < 200; ++i) {
    const auto out = memory::augment_window(w, cfg, rng);
    const bool all_unknown = std::all_of(out.entries.begin(), out.entries.end(),
                                         [](const auto& e) { return e.is_unknown(); });
    const bool none_unknown = std::none_of(out.entries.begin(), out.entries.end(),
                                           [](const auto& e) { return e.is_unknown(); });
    // The long branch has an empty segment and is a no-op.
    EXPECT_TRUE(all_unknown || none_unknown);
    full += all_unknown;
  }
  EXPECT_GT(full, 60);
  EXPECT_LT(full, 140);
}

TEST(AugmentWindow, ShortOnlyWindowWithBothBranchesShort) {
  std::mt19937_64 rng(3);
  const auto w = window_of(4);
  memory::AugmentationConfig cfg{1.0, 1.0, 1.0, 10, false};
  for (int i = 0; i < 50; ++i) {
    const auto out = memory::augment_window(w, cfg, rng);
    const auto unknown = std::count_if(out.entries.begin(), out.entries.end(),
                                       [](const auto& e) { return e.is_unknown(); });
    EXPECT_TRUE(unknown == 0 || unknown == 4);
  }
}

TEST(AugmentWindow, MonteCarloReplacedFraction) {
  std::mt19937_64 rng(4);
  const auto w = window_of(10);  // 5 short entries, 5 long entries
  memory::AugmentationConfig cfg{1.0, 0.5, 0.5, 5, false};
  double total = 0.0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const auto out = memory::augment_window(w, cfg, rng);
    const auto unknown = std::count_if(out.entries.begin(), out.entries.end(),
                                       [](const auto& e) { return e.is_unknown(); });
    total += static_cast<double>(unknown) / 5.0;  // fraction of the chosen segment
  }
  EXPECT_NEAR(total / trials, 0.5, 0.02);
}

TEST(AugmentWindow, PreservesStructureAndIsDeterministic) {
  const auto w = window_of(23);
  memory::AugmentationConfig cfg{0.7, 0.4, 0.6, 5, false};
  for (bool contiguous : {false, true}) {
    cfg.contiguous = contiguous;
    std::mt19937_64 a(9), b(9);
    for (int i = 0; i < 300; ++i) {
      const auto out = memory::augment_window(w, cfg, a);
      EXPECT_EQ(out, memory::augment_window(w, cfg, b));
      ASSERT_EQ(out.entries.size(), w.entries.size());
      EXPECT_EQ(out.toi, w.toi);
      for (std::size_t k = 0; k < w.entries.size(); ++k) {
        EXPECT_EQ(out.entries[k].t, w.entries[k].t);
        EXPECT_EQ(out.entries[k].toi_id, w.entries[k].toi_id);
        if (!out.entries[k].is_unknown()) EXPECT_EQ(out.entries[k].graph, w.entries[k].graph);
      }
    }
  }
}

TEST(AugmentWindow, ContiguousReplacesABlock) {
  std::mt19937_64 rng(5);
  const auto w = window_of(30);
  memory::AugmentationConfig cfg{1.0, 0.5, 0.5, 5, true};
  for (int i = 0; i < 200; ++i) {
    const auto out = memory::augment_window(w, cfg, rng);
    std::vector<std::size_t> masked;
    for (std::size_t k = 0; k < out.entries.size(); ++k) {
      if (out.entries[k].is_unknown()) masked.push_back(k);
    }
    if (masked.size() > 1) EXPECT_EQ(masked.back() - masked.front() + 1, masked.size());
  }
}

TEST(AugmentWindow, RejectsInvalidConfig) {
  EXPECT_THROW((memory::AugmentationConfig{1.5, 0.5, 0.5, 5, false}.validate()), DataError);
  EXPECT_THROW((memory::AugmentationConfig{0.5, -0.1, 0.5, 5, false}.validate()), DataError);
  EXPECT_THROW((memory::AugmentationConfig{0.5, 0.5, 0.5, 0, false}.validate()), DataError);
}

}  // namespace
}  // namespace memsg
