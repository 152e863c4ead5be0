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

#include "memsg/num/attention.hpp"

#include <algorithm>
#include <cmath>

#include "memsg/error.hpp"

namespace memsg::num {

std::vector<std::size_t> attention_cell_offsets(std::span<const AttentionSegment> segments) {
  std::vector<std::size_t> offsets{0};
  offsets.reserve(segments.size() + 1);
  for (const auto& s : segments) offsets.push_back(offsets.back() + s.num_queries() * s.num_keys());
  return offsets;
}

AttentionResult segment_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                  std::span<const AttentionSegment> segments, std::size_t heads,
                                  const Tensor* bias) {
  if (q.rank() != 2 || k.rank() != 2 || v.shape() != k.shape() || q.cols() != k.cols()) {
    throw ShapeError("segment_attention: incompatible shapes " + to_string(q.shape()) + ", " +
                     to_string(k.shape()) + ", " + to_string(v.shape()));
  }
  const std::size_t d = q.cols();
  if (heads == 0 || d % heads != 0) {
    throw ShapeError("segment_attention: dim " + std::to_string(d) + " not divisible by " +
                     std::to_string(heads) + " heads");
  }
  const std::size_t dh = d / heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<AttentionSegment> segs(segments.begin(), segments.end());
  for (const auto& s : segs) {
    if (s.q_end < s.q_begin || s.k_end < s.k_begin || s.q_end > q.rows() || s.k_end > k.rows()) {
      throw ShapeError("segment_attention: segment out of range");
    }
  }
  auto offsets = attention_cell_offsets(segs);
  const std::size_t cells = offsets.back();
  if (bias != nullptr && (bias->rank() != 2 || bias->rows() != cells || bias->cols() != heads)) {
    throw ShapeError("segment_attention: bias shape " + to_string(bias->shape()) + ", expected [" +
                     std::to_string(cells) + "," + std::to_string(heads) + "]");
  }

  auto weights = std::make_shared<std::vector<double>>(cells * heads, 0.0);
  std::vector<double> out(q.rows() * d, 0.0);
  const double* pq = q.data().data();
  const double* pk = k.data().data();
  const double* pv = v.data().data();
  const double* pb = bias ? bias->data().data() : nullptr;
  std::vector<double> logits;

  for (std::size_t s = 0; s < segs.size(); ++s) {
    const auto& seg = segs[s];
    const std::size_t nk = seg.num_keys();
    if (nk == 0) continue;
    logits.resize(nk);
    for (std::size_t i = 0; i < seg.num_queries(); ++i) {
      const std::size_t qi = seg.q_begin + i;
      for (std::size_t h = 0; h < heads; ++h) {
        const double* qrow = pq + qi * d + h * dh;
        double mx = -INFINITY;
        for (std::size_t j = 0; j < nk; ++j) {
          const double* krow = pk + (seg.k_begin + j) * d + h * dh;
          double dot = 0.0;
          for (std::size_t c = 0; c < dh; ++c) dot += qrow[c] * krow[c];
          double logit = dot * inv_scale;
          if (pb) logit += pb[(offsets[s] + i * nk + j) * heads + h];
          logits[j] = logit;
          mx = std::max(mx, logit);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < nk; ++j) {
          logits[j] = std::exp(logits[j] - mx);
          z += logits[j];
        }
        double* orow = out.data() + qi * d + h * dh;
        for (std::size_t j = 0; j < nk; ++j) {
          const double p = logits[j] / z;
          (*weights)[(offsets[s] + i * nk + j) * heads + h] = p;
          const double* vrow = pv + (seg.k_begin + j) * d + h * dh;
          for (std::size_t c = 0; c < dh; ++c) orow[c] += p * vrow[c];
        }
      }
    }
  }

  std::vector<Tensor> parents{q, k, v};
  Tensor bias_t;
  if (bias) {
    bias_t = *bias;
    parents.push_back(bias_t);
  }
  AttentionResult result;
  result.cell_offsets = offsets;
  result.heads = heads;
  result.weights = weights;
  result.output = detail::make_result(
      {q.rows(), d}, std::move(out), parents,
      [q, k, v, bias_t, segs, offsets, weights, heads, d, dh, inv_scale](Node& self) {
        const double* g = self.grad.data();
        const double* pq = q.data().data();
        const double* pk = k.data().data();
        const double* pv = v.data().data();
        double* dq = q.requires_grad() ? q.node()->ensure_grad().data() : nullptr;
        double* dk = k.requires_grad() ? k.node()->ensure_grad().data() : nullptr;
        double* dv = v.requires_grad() ? v.node()->ensure_grad().data() : nullptr;
        double* db = (bias_t.defined() && bias_t.requires_grad())
                         ? bias_t.node()->ensure_grad().data()
                         : nullptr;
        std::vector<double> dlogit;
        for (std::size_t s = 0; s < segs.size(); ++s) {
          const auto& seg = segs[s];
          const std::size_t nk = seg.num_keys();
          if (nk == 0) continue;
          dlogit.resize(nk);
          for (std::size_t i = 0; i < seg.num_queries(); ++i) {
            const std::size_t qi = seg.q_begin + i;
            for (std::size_t h = 0; h < heads; ++h) {
              const double* grow = g + qi * d + h * dh;
              double dot = 0.0;
              for (std::size_t j = 0; j < nk; ++j) {
                const double p = (*weights)[(offsets[s] + i * nk + j) * heads + h];
                const std::size_t kj = seg.k_begin + j;
                const double* vrow = pv + kj * d + h * dh;
                double dp = 0.0;
                for (std::size_t c = 0; c < dh; ++c) dp += grow[c] * vrow[c];
                if (dv) {
                  double* dvrow = dv + kj * d + h * dh;
                  for (std::size_t c = 0; c < dh; ++c) dvrow[c] += p * grow[c];
                }
                dlogit[j] = dp;
                dot += p * dp;
              }
              for (std::size_t j = 0; j < nk; ++j) {
                const std::size_t cell = (offsets[s] + i * nk + j) * heads + h;
                const double dl = (*weights)[cell] * (dlogit[j] - dot);
                if (db) db[cell] += dl;
                const double ds = dl * inv_scale;
                const std::size_t kj = seg.k_begin + j;
                if (dq) {
                  const double* krow = pk + kj * d + h * dh;
                  double* dqrow = dq + qi * d + h * dh;
                  for (std::size_t c = 0; c < dh; ++c) dqrow[c] += ds * krow[c];
                }
                if (dk) {
                  const double* qrow = pq + qi * d + h * dh;
                  double* dkrow = dk + kj * d + h * dh;
                  for (std::size_t c = 0; c < dh; ++c) dkrow[c] += ds * qrow[c];
                }
              }
            }
          }
        }
      });
  return result;
}

}  // namespace memsg::num
