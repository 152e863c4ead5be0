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

#include "memsg/num/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "memsg/error.hpp"

namespace memsg::num {

using detail::make_result;

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + to_string(a) + " and " +
                   to_string(b));
}

void require_matrix(const char* op, const Tensor& x) {
  if (x.rank() != 2) throw ShapeError(std::string(op) + ": expected a matrix, got " + to_string(x.shape()));
}

// Accumulate `values` into the grad of `t` if it participates in the tape.
template <typename F>
void accumulate(const Tensor& t, F&& fill) {
  if (!t.requires_grad()) return;
  fill(t.node()->ensure_grad());
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    shape_error("matmul", a.shape(), b.shape());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = pa[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += aip * brow[j];
    }
  }
  return make_result({m, n}, std::move(out), {a, b}, [a, b, m, k, n](Node& self) {
    const double* g = self.grad.data();
    accumulate(a, [&](std::vector<double>& da) {
      const double* pb = b.data().data();
      for (std::size_t i = 0; i < m; ++i) {
        const double* gi = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double* bp = pb + p * n;
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += gi[j] * bp[j];
          da[i * k + p] += acc;
        }
      }
    });
    accumulate(b, [&](std::vector<double>& db) {
      const double* pa = a.data().data();
      for (std::size_t i = 0; i < m; ++i) {
        const double* gi = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = pa[i * k + p];
          if (aip == 0.0) continue;
          double* dbp = db.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) dbp[j] += aip * gi[j];
        }
      }
    });
  });
}

namespace {

template <typename Fwd, typename DA, typename DB>
Tensor binary_elementwise(const char* name, const Tensor& a, const Tensor& b, Fwd fwd, DA da_fn,
                          DB db_fn) {
  if (a.shape() != b.shape()) shape_error(name, a.shape(), b.shape());
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a.at(i), b.at(i));
  return make_result(a.shape(), std::move(out), {a, b}, [a, b, da_fn, db_fn](Node& self) {
    const auto& g = self.grad;
    accumulate(a, [&](std::vector<double>& da) {
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * da_fn(a.at(i), b.at(i));
    });
    accumulate(b, [&](std::vector<double>& db) {
      for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * db_fn(a.at(i), b.at(i));
    });
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& v : out) v *= factor;
  return make_result(a.shape(), std::move(out), {a}, [a, factor](Node& self) {
    accumulate(a, [&](std::vector<double>& da) {
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += factor * self.grad[i];
    });
  });
}

Tensor add_row(const Tensor& x, const Tensor& row) {
  if (x.rank() != 2 || row.rank() != 1 || row.dim(0) != x.cols()) {
    shape_error("add_row", x.shape(), row.shape());
  }
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> out(x.data().begin(), x.data().end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] += row.at(j);
  }
  return make_result(x.shape(), std::move(out), {x, row}, [x, row, n, d](Node& self) {
    const auto& g = self.grad;
    accumulate(x, [&](std::vector<double>& dx) {
      for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
    });
    accumulate(row, [&](std::vector<double>& dr) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) dr[j] += g[i * d + j];
      }
    });
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  return add_row(matmul(x, weight), bias);
}

namespace {

template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& x, Fwd fwd, Deriv deriv) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(x.at(i));
  return make_result(x.shape(), std::move(out), {x}, [x, deriv](Node& self) {
    accumulate(x, [&](std::vector<double>& dx) {
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[i] * deriv(x.at(i));
    });
  });
}

}  // namespace

Tensor relu(const Tensor& x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor gelu(const Tensor& x) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [inv_sqrt_2pi](double v) {
        const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
        return cdf + v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
      });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank() || x.rank() > 2) {
    throw ShapeError("softmax: axis " + std::to_string(axis) + " invalid for shape " +
                     to_string(x.shape()));
  }
  // View as [outer, len, inner] with the softmax over len.
  const std::size_t len = x.dim(axis);
  const std::size_t inner = (x.rank() == 2 && axis == 0) ? x.dim(1) : 1;
  const std::size_t outer = x.size() / (len * inner);
  std::vector<double> out(x.size());
  const auto in = x.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t c = 0; c < inner; ++c) {
      const std::size_t base = o * len * inner + c;
      double mx = in[base];
      for (std::size_t i = 1; i < len; ++i) mx = std::max(mx, in[base + i * inner]);
      double total = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        const double e = std::exp(in[base + i * inner] - mx);
        out[base + i * inner] = e;
        total += e;
      }
      for (std::size_t i = 0; i < len; ++i) out[base + i * inner] /= total;
    }
  }
  return make_result(x.shape(), out, {x}, [x, out, outer, len, inner](Node& self) {
    accumulate(x, [&](std::vector<double>& dx) {
      const auto& g = self.grad;
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t c = 0; c < inner; ++c) {
          const std::size_t base = o * len * inner + c;
          double dot = 0.0;
          for (std::size_t i = 0; i < len; ++i) dot += g[base + i * inner] * out[base + i * inner];
          for (std::size_t i = 0; i < len; ++i) {
            const std::size_t k = base + i * inner;
            dx[k] += out[k] * (g[k] - dot);
          }
        }
      }
    });
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  if (x.rank() != 2 || gamma.rank() != 1 || beta.shape() != gamma.shape() ||
      gamma.dim(0) != x.cols()) {
    shape_error("layer_norm", x.shape(), gamma.shape());
  }
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> normalized(x.size());
  std::vector<double> inv_std(n);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x.data().data() + i * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      const double xh = (row[j] - mu) * inv_std[i];
      normalized[i * d + j] = xh;
      out[i * d + j] = gamma.at(j) * xh + beta.at(j);
    }
  }
  return make_result(
      x.shape(), std::move(out), {x, gamma, beta},
      [x, gamma, beta, normalized = std::move(normalized), inv_std = std::move(inv_std), n,
       d](Node& self) {
        const auto& g = self.grad;
        accumulate(beta, [&](std::vector<double>& db) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) db[j] += g[i * d + j];
        });
        accumulate(gamma, [&](std::vector<double>& dg) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) dg[j] += g[i * d + j] * normalized[i * d + j];
        });
        accumulate(x, [&](std::vector<double>& dx) {
          std::vector<double> dxh(d);
          for (std::size_t i = 0; i < n; ++i) {
            double mean_dxh = 0.0;
            double mean_dxh_xh = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              dxh[j] = g[i * d + j] * gamma.at(j);
              mean_dxh += dxh[j];
              mean_dxh_xh += dxh[j] * normalized[i * d + j];
            }
            mean_dxh /= static_cast<double>(d);
            mean_dxh_xh /= static_cast<double>(d);
            for (std::size_t j = 0; j < d; ++j) {
              dx[i * d + j] +=
                  inv_std[i] * (dxh[j] - mean_dxh - normalized[i * d + j] * mean_dxh_xh);
            }
          }
        });
      });
}

Tensor embedding_lookup(const Tensor& table, std::span<const int> indices) {
  require_matrix("embedding_lookup", table);
  const std::size_t vocab = table.rows(), d = table.cols();
  std::vector<int> idx(indices.begin(), indices.end());
  for (int i : idx) {
    if (i < -1 || i >= static_cast<int>(vocab)) {
      throw ShapeError("embedding_lookup: index " + std::to_string(i) + " out of range for " +
                       to_string(table.shape()));
    }
  }
  std::vector<double> out(idx.size() * d, 0.0);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0) continue;
    std::copy_n(table.data().data() + idx[r] * d, d, out.data() + r * d);
  }
  return make_result({idx.size(), d}, std::move(out), {table}, [table, idx, d](Node& self) {
    accumulate(table, [&](std::vector<double>& dt) {
      for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] < 0) continue;
        for (std::size_t j = 0; j < d; ++j) dt[idx[r] * d + j] += self.grad[r * d + j];
      }
    });
  });
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const std::size_t rank = parts[0].rank();
  if (rank == 0 || rank > 2 || axis >= rank) {
    throw ShapeError("concat: axis " + std::to_string(axis) + " invalid for shape " +
                     to_string(parts[0].shape()));
  }
  Shape out_shape = parts[0].shape();
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    if (p.rank() != rank) shape_error("concat", parts[0].shape(), p.shape());
    for (std::size_t a = 0; a < rank; ++a) {
      if (a != axis && p.dim(a) != parts[0].dim(a)) shape_error("concat", parts[0].shape(), p.shape());
    }
    out_shape[axis] += p.dim(axis);
  }
  // Rows of the [outer, width] view; axis 0 stacks blocks, axis 1 interleaves.
  const std::size_t outer = (rank == 2 && axis == 1) ? out_shape[0] : 1;
  const std::size_t total_width = numel(out_shape) / outer;
  std::vector<double> out(numel(out_shape));
  std::vector<std::size_t> widths;
  std::size_t col = 0;
  for (const auto& p : parts) {
    const std::size_t w = p.size() / outer;
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(p.data().data() + o * w, w, out.data() + o * total_width + col);
    }
    widths.push_back(w);
    col += w;
  }
  std::vector<Tensor> parents(parts.begin(), parts.end());
  return make_result(out_shape, std::move(out), parents,
                     [parents, widths, outer, total_width](Node& self) {
                       std::size_t col = 0;
                       for (std::size_t k = 0; k < parents.size(); ++k) {
                         const std::size_t w = widths[k];
                         accumulate(parents[k], [&](std::vector<double>& dp) {
                           for (std::size_t o = 0; o < outer; ++o)
                             for (std::size_t j = 0; j < w; ++j)
                               dp[o * w + j] += self.grad[o * total_width + col + j];
                         });
                         col += w;
                       }
                     });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.size()) shape_error("reshape", x.shape(), shape);
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result(std::move(shape), std::move(out), {x}, [x](Node& self) {
    accumulate(x, [&](std::vector<double>& dx) {
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[i];
    });
  });
}

Tensor mean(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank() || x.rank() > 2) {
    throw ShapeError("mean: axis " + std::to_string(axis) + " invalid for shape " +
                     to_string(x.shape()));
  }
  if (x.rank() == 1) return scale(sum(x), 1.0 / static_cast<double>(x.size()));
  const std::size_t n = x.rows(), d = x.cols();
  const std::size_t len = axis == 0 ? n : d;
  Shape out_shape{axis == 0 ? d : n};
  std::vector<double> out(out_shape[0], 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out[axis == 0 ? j : i] += x.at(i * d + j);
  for (double& v : out) v /= static_cast<double>(len);
  return make_result(out_shape, std::move(out), {x}, [x, n, d, axis, len](Node& self) {
    accumulate(x, [&](std::vector<double>& dx) {
      const double inv = 1.0 / static_cast<double>(len);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) dx[i * d + j] += self.grad[axis == 0 ? j : i] * inv;
    });
  });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return make_result({}, {total}, {x}, [x](Node& self) {
    accumulate(x, [&](std::vector<double>& dx) {
      for (double& v : dx) v += self.grad[0];
    });
  });
}

Tensor segment_mean(const Tensor& x, std::span<const std::size_t> offsets) {
  require_matrix("segment_mean", x);
  if (offsets.size() < 2 || offsets.front() != 0 || offsets.back() != x.rows()) {
    throw ShapeError("segment_mean: offsets do not partition the rows of " + to_string(x.shape()));
  }
  const std::size_t groups = offsets.size() - 1, d = x.cols();
  std::vector<std::size_t> off(offsets.begin(), offsets.end());
  std::vector<double> out(groups * d, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    if (off[g + 1] < off[g]) throw ShapeError("segment_mean: decreasing offsets");
    const std::size_t count = off[g + 1] - off[g];
    if (count == 0) continue;
    for (std::size_t r = off[g]; r < off[g + 1]; ++r)
      for (std::size_t j = 0; j < d; ++j) out[g * d + j] += x.at(r * d + j);
    for (std::size_t j = 0; j < d; ++j) out[g * d + j] /= static_cast<double>(count);
  }
  return make_result({groups, d}, std::move(out), {x}, [x, off, groups, d](Node& self) {
    accumulate(x, [&](std::vector<double>& dx) {
      for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t count = off[g + 1] - off[g];
        if (count == 0) continue;
        const double inv = 1.0 / static_cast<double>(count);
        for (std::size_t r = off[g]; r < off[g + 1]; ++r)
          for (std::size_t j = 0; j < d; ++j) dx[r * d + j] += self.grad[g * d + j] * inv;
      }
    });
  });
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> targets) {
  require_matrix("cross_entropy", logits);
  const std::size_t n = logits.rows(), c = logits.cols();
  if (targets.size() != n) {
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) + " targets for logits " +
                     to_string(logits.shape()));
  }
  std::vector<int> tgt(targets.begin(), targets.end());
  std::vector<double> probs(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tgt[i] < 0 || tgt[i] >= static_cast<int>(c)) {
      throw ShapeError("cross_entropy: target " + std::to_string(tgt[i]) + " out of range for " +
                       to_string(logits.shape()));
    }
    const double* row = logits.data().data() + i * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      probs[i * c + j] = std::exp(row[j] - mx);
      z += probs[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) probs[i * c + j] /= z;
    total += (mx + std::log(z)) - row[tgt[i]];
  }
  return make_result({}, {total / static_cast<double>(n)}, {logits},
                     [logits, probs = std::move(probs), tgt, n, c](Node& self) {
                       accumulate(logits, [&](std::vector<double>& dl) {
                         const double gs = self.grad[0] / static_cast<double>(n);
                         for (std::size_t i = 0; i < n; ++i) {
                           for (std::size_t j = 0; j < c; ++j) {
                             const double onehot = static_cast<int>(j) == tgt[i] ? 1.0 : 0.0;
                             dl[i * c + j] += gs * (probs[i * c + j] - onehot);
                           }
                         }
                       });
                     });
}

Tensor cross_entropy(const Tensor& logits, int target) {
  if (logits.rank() != 1) throw ShapeError("cross_entropy: expected [C] logits, got " + to_string(logits.shape()));
  const int targets[] = {target};
  return cross_entropy(reshape(logits, {1, logits.size()}), targets);
}

}  // namespace memsg::num
