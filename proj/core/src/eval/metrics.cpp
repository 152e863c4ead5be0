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

#include "memsg/eval/metrics.hpp"

#include <algorithm>
#include <map>

#include "memsg/error.hpp"

namespace memsg::eval {

Confusion::Confusion(std::size_t num_predicates)
    : n_(num_predicates), counts_(num_predicates * num_predicates, 0) {}

void Confusion::add(int gt, int pred, std::size_t count) {
  if (gt < 0 || pred < 0 || static_cast<std::size_t>(gt) >= n_ ||
      static_cast<std::size_t>(pred) >= n_) {
    throw DataError("predicate index out of range in confusion update");
  }
  counts_[gt * n_ + pred] += count;
}

void Confusion::add_timepoint(const sg::SceneGraph& pred, const sg::SceneGraph& gt,
                              int none_index) {
  if (pred.sorted_entity_ids() != gt.sorted_entity_ids()) {
    throw DataError("prediction and ground truth have different entity sets");
  }
  std::map<sg::EntityPair, int> p, g;
  for (const auto& r : pred.relations) p[{r.subject, r.object}] = r.predicate;
  for (const auto& r : gt.relations) g[{r.subject, r.object}] = r.predicate;
  for (const auto& pair : sg::ordered_pairs(gt)) {
    const auto pi = p.find(pair);
    const auto gi = g.find(pair);
    add(gi == g.end() ? none_index : gi->second, pi == p.end() ? none_index : pi->second);
  }
}

void Confusion::add_sequence(std::span<const sg::SceneGraph> preds,
                             std::span<const sg::SceneGraph> gts, int none_index) {
  if (preds.size() != gts.size()) {
    throw DataError("misaligned sequences: " + std::to_string(preds.size()) +
                    " predictions vs " + std::to_string(gts.size()) + " ground-truth graphs");
  }
  for (std::size_t i = 0; i < preds.size(); ++i) add_timepoint(preds[i], gts[i], none_index);
}

std::vector<std::vector<std::size_t>> Confusion::matrix() const {
  std::vector<std::vector<std::size_t>> m(n_, std::vector<std::size_t>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    std::copy_n(counts_.begin() + static_cast<std::ptrdiff_t>(i * n_), n_, m[i].begin());
  }
  return m;
}

F1Report f1_report(const Confusion& confusion, const sg::Vocabulary& vocab, bool include_none) {
  const std::size_t n = confusion.size();
  if (n != vocab.num_predicates()) throw DataError("confusion size does not match vocabulary");
  F1Report report;
  report.confusion = confusion.matrix();
  double total = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    ClassScore s;
    s.predicate = static_cast<int>(c);
    s.name = vocab.predicate_name(static_cast<int>(c));
    s.true_positive = confusion.at(static_cast<int>(c), static_cast<int>(c));
    for (std::size_t k = 0; k < n; ++k) {
      s.support += confusion.at(static_cast<int>(c), static_cast<int>(k));
      s.predicted += confusion.at(static_cast<int>(k), static_cast<int>(c));
    }
    const double tp = static_cast<double>(s.true_positive);
    s.precision = s.predicted ? tp / static_cast<double>(s.predicted) : 0.0;
    s.recall = s.support ? tp / static_cast<double>(s.support) : 0.0;
    const double denom = static_cast<double>(s.predicted + s.support);
    s.f1 = denom > 0.0 ? 2.0 * tp / denom : 0.0;
    const bool is_none = static_cast<int>(c) == vocab.none_index();
    s.included = (s.support + s.predicted > 0) && (include_none || !is_none);
    if (s.included) {
      report.included_classes.push_back(s.predicate);
      total += s.f1;
    }
    report.per_class.push_back(std::move(s));
  }
  report.macro_f1 = report.included_classes.empty()
                        ? 1.0
                        : total / static_cast<double>(report.included_classes.size());
  return report;
}

F1Report macro_f1(std::span<const sg::SceneGraph> preds, std::span<const sg::SceneGraph> gts,
                  const sg::Vocabulary& vocab, bool include_none) {
  Confusion confusion(vocab.num_predicates());
  confusion.add_sequence(preds, gts, vocab.none_index());
  return f1_report(confusion, vocab, include_none);
}

F1Report macro_f1(std::span<const std::vector<sg::SceneGraph>> preds,
                  std::span<const std::vector<sg::SceneGraph>> gts, const sg::Vocabulary& vocab,
                  bool include_none) {
  if (preds.size() != gts.size()) throw DataError("misaligned recording lists");
  Confusion confusion(vocab.num_predicates());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    confusion.add_sequence(preds[i], gts[i], vocab.none_index());
  }
  return f1_report(confusion, vocab, include_none);
}

double set_iou(const std::set<int>& a, const std::set<int>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (int x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

namespace {

void accumulate_iou(std::span<const sg::SceneGraph> graphs, const sg::Vocabulary& vocab,
                    const std::set<int>& excluded, double& total, std::size_t& pairs) {
  std::set<int> previous;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    auto current = sg::predicate_set(graphs[i], vocab, excluded);
    if (i > 0) {
      total += set_iou(previous, current);
      ++pairs;
    }
    previous = std::move(current);
  }
}

}  // namespace

double consistency(std::span<const sg::SceneGraph> graphs, const sg::Vocabulary& vocab,
                   const std::set<int>& excluded) {
  if (graphs.size() < 2) throw DataError("consistency needs at least two timepoints");
  double total = 0.0;
  std::size_t pairs = 0;
  accumulate_iou(graphs, vocab, excluded, total, pairs);
  return total / static_cast<double>(pairs);
}

double consistency(std::span<const std::vector<sg::SceneGraph>> sequences,
                   const sg::Vocabulary& vocab, const std::set<int>& excluded) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (const auto& seq : sequences) accumulate_iou(seq, vocab, excluded, total, pairs);
  if (pairs == 0) throw DataError("consistency needs at least two timepoints");
  return total / static_cast<double>(pairs);
}

}  // namespace memsg::eval
