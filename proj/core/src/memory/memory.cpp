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

#include "memsg/memory/memory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memsg/error.hpp"

namespace memsg::memory {

std::string_view to_string(MemoryMode mode) {
  switch (mode) {
    case MemoryMode::kAll:
      return "all";
    case MemoryMode::kShort:
      return "short";
    case MemoryMode::kLong:
      return "long";
    case MemoryMode::kLongShort:
      return "longshort";
  }
  return "?";
}

MemoryMode parse_memory_mode(std::string_view name) {
  if (name == "all") return MemoryMode::kAll;
  if (name == "short") return MemoryMode::kShort;
  if (name == "long") return MemoryMode::kLong;
  if (name == "longshort") return MemoryMode::kLongShort;
  throw DataError("unknown memory mode '" + std::string(name) + "'");
}

std::string_view to_string(LongAnchor anchor) {
  return anchor == LongAnchor::kToi ? "toi" : "start";
}

LongAnchor parse_long_anchor(std::string_view name) {
  if (name == "toi") return LongAnchor::kToi;
  if (name == "start") return LongAnchor::kStart;
  throw DataError("unknown long anchor '" + std::string(name) + "'");
}

namespace {

void short_indices(int stride, int toi, std::vector<int>& out) {
  for (int t = std::max(0, toi - stride); t < toi; ++t) out.push_back(t);
}

void long_indices(int stride, int toi, LongAnchor anchor, std::vector<int>& out) {
  if (anchor == LongAnchor::kToi) {
    for (int t = toi - stride; t >= 0; t -= stride) out.push_back(t);
  } else {
    for (int t = 0; t < toi; t += stride) out.push_back(t);
  }
}

}  // namespace

std::vector<int> select_memory_indices(const MemoryConfig& config, int toi) {
  if (config.stride < 1) throw DataError("memory stride must be >= 1");
  if (toi < 0) throw DataError("timepoint of interest must be >= 0");
  std::vector<int> out;
  switch (config.mode) {
    case MemoryMode::kAll:
      out.resize(toi);
      std::iota(out.begin(), out.end(), 0);
      return out;
    case MemoryMode::kShort:
      short_indices(config.stride, toi, out);
      break;
    case MemoryMode::kLong:
      long_indices(config.stride, toi, config.anchor, out);
      break;
    case MemoryMode::kLongShort:
      short_indices(config.stride, toi, out);
      long_indices(config.stride, toi, config.anchor, out);
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

template <typename Lookup>
MemoryWindow build_window_impl(Lookup&& lookup, const MemoryConfig& config, int toi) {
  MemoryWindow window;
  window.toi = toi;
  for (int t : select_memory_indices(config, toi)) {
    const sg::SceneGraph* graph = lookup(t);
    if (graph == nullptr) {
      throw DataError("memory window for T=" + std::to_string(toi) + " needs the graph at t=" +
                      std::to_string(t));
    }
    window.entries.push_back({t, toi - t, *graph});
  }
  return window;
}

}  // namespace

MemoryWindow build_window(std::span<const sg::SceneGraph> graphs, const MemoryConfig& config,
                          int toi) {
  return build_window_impl(
      [&](int t) -> const sg::SceneGraph* {
        return static_cast<std::size_t>(t) < graphs.size() ? &graphs[t] : nullptr;
      },
      config, toi);
}

MemoryWindow build_window(const std::map<int, sg::SceneGraph>& graphs,
                          const MemoryConfig& config, int toi) {
  return build_window_impl(
      [&](int t) -> const sg::SceneGraph* {
        auto it = graphs.find(t);
        return it == graphs.end() ? nullptr : &it->second;
      },
      config, toi);
}

void AugmentationConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(p_apply) || !unit(short_fraction) || !unit(long_fraction)) {
    throw DataError("augmentation probabilities and fractions must lie in [0, 1]");
  }
  if (boundary < 1) throw DataError("augmentation boundary must be >= 1");
}

MemoryWindow augment_window(MemoryWindow window, const AugmentationConfig& config,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!(unit(rng) < config.p_apply)) return window;
  const bool pick_short = unit(rng) < 0.5;

  std::vector<std::size_t> segment;
  for (std::size_t i = 0; i < window.entries.size(); ++i) {
    const bool is_short = window.entries[i].toi_id <= config.boundary;
    if (is_short == pick_short) segment.push_back(i);
  }
  if (segment.empty()) return window;

  const double fraction = pick_short ? config.short_fraction : config.long_fraction;
  const double target = fraction * static_cast<double>(segment.size());
  std::size_t count = static_cast<std::size_t>(std::floor(target));
  if (unit(rng) < target - std::floor(target)) ++count;
  count = std::min(count, segment.size());
  if (count == 0) return window;

  if (config.contiguous) {
    std::uniform_int_distribution<std::size_t> start_dist(0, segment.size() - count);
    const std::size_t start = start_dist(rng);
    for (std::size_t k = start; k < start + count; ++k) {
      window.entries[segment[k]].graph.reset();
    }
  } else {
    // Partial Fisher-Yates: the first `count` slots form a uniform subset.
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, segment.size() - 1);
      std::swap(segment[k], segment[pick(rng)]);
      window.entries[segment[k]].graph.reset();
    }
  }
  return window;
}

}  // namespace memsg::memory
