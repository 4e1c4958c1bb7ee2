// Copyright 2026 The spikekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spikekit/ops.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "autodiff.hpp"
#include "spikekit/error.hpp"

namespace spikekit {
namespace {

using detail::Recorder;

std::string shapes_of(const Tensor& a, const Tensor& b) {
  return shape_string(a.shape()) + " and " + shape_string(b.shape());
}

// ---------------------------------------------------------------------------
// Elementwise kernels

enum class Layout { same, a_scalar, b_scalar, a_row, b_row };

Layout classify(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Layout::same;
  if (b.size() == 1 && (a.size() > 1 || a.rank() >= b.rank())) return Layout::b_scalar;
  if (a.size() == 1) return Layout::a_scalar;
  if (b.rank() == 1 && a.rank() >= 1 && a.shape().back() == b.dim(0)) return Layout::b_row;
  if (a.rank() == 1 && b.rank() >= 1 && b.shape().back() == a.dim(0)) return Layout::a_row;
  throw DimensionError(std::string(op) + ": cannot broadcast " + shapes_of(a, b));
}

// Calls fn(out_index, a_index, b_index) for every output element.
template <class Fn>
void each(Layout layout, std::size_t n, std::size_t row, Fn&& fn) {
  switch (layout) {
    case Layout::same:
      for (std::size_t i = 0; i < n; ++i) fn(i, i, i);
      break;
    case Layout::a_scalar:
      for (std::size_t i = 0; i < n; ++i) fn(i, std::size_t{0}, i);
      break;
    case Layout::b_scalar:
      for (std::size_t i = 0; i < n; ++i) fn(i, i, std::size_t{0});
      break;
    case Layout::a_row:
      for (std::size_t r = 0; r < n; r += row)
        for (std::size_t j = 0; j < row; ++j) fn(r + j, j, r + j);
      break;
    case Layout::b_row:
      for (std::size_t r = 0; r < n; r += row)
        for (std::size_t j = 0; j < row; ++j) fn(r + j, r + j, j);
      break;
  }
}

// f(x, y) -> value; da/db(x, y, out) -> local partial derivatives.
template <class F, class DA, class DB>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, F f, DA da, DB db) {
  const Layout layout = classify(a, b, op);
  const bool a_is_out = layout == Layout::same || layout == Layout::b_scalar ||
                        layout == Layout::b_row;
  const Shape& out_shape = a_is_out ? a.shape() : b.shape();
  const std::size_t n = shape_size(out_shape);
  const std::size_t row = layout == Layout::b_row ? b.size()
                          : layout == Layout::a_row ? a.size()
                                                    : 1;
  std::vector<double> out(n);
  const double* pa = a.raw();
  const double* pb = b.raw();
  each(layout, n, row,
       [&](std::size_t i, std::size_t ia, std::size_t ib) { out[i] = f(pa[ia], pb[ib]); });
  Tensor result(out_shape, std::move(out));
  if (!a.requires_grad() && !b.requires_grad()) return result;
  return Recorder::record(
      result, {&a, &b},
      [layout, n, row, av = a.detached(), bv = b.detached(), ov = result.detached(), da, db](
          std::span<const double> g, std::span<const std::span<double>> gin) {
        const double* pa = av.raw();
        const double* pb = bv.raw();
        const double* po = ov.raw();
        if (!gin[0].empty()) {
          double* ga = gin[0].data();
          each(layout, n, row, [&](std::size_t i, std::size_t ia, std::size_t ib) {
            ga[ia] += g[i] * da(pa[ia], pb[ib], po[i]);
          });
        }
        if (!gin[1].empty()) {
          double* gb = gin[1].data();
          each(layout, n, row, [&](std::size_t i, std::size_t ia, std::size_t ib) {
            gb[ib] += g[i] * db(pa[ia], pb[ib], po[i]);
          });
        }
      });
}

// f(x) -> value; d(x, out) -> derivative.
template <class F, class D>
Tensor unary(const Tensor& x, F f, D d) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  const double* px = x.raw();
  for (std::size_t i = 0; i < n; ++i) out[i] = f(px[i]);
  Tensor result(x.shape(), std::move(out));
  if (!x.requires_grad()) return result;
  return Recorder::record(result, {&x},
                          [xv = x.detached(), ov = result.detached(), d](
                              std::span<const double> g, std::span<const std::span<double>> gin) {
                            const double* px = xv.raw();
                            const double* po = ov.raw();
                            double* gx = gin[0].data();
                            for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * d(px[i], po[i]);
                          });
}

double logistic_value(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Matrix product helpers

bool mostly_zero(const Tensor& t) {
  const auto d = t.data();
  const auto zeros = std::count(d.begin(), d.end(), 0.0);
  return static_cast<std::size_t>(zeros) * 2 > d.size();
}

// c[m,n] += a[m,k] * b[k,n], skipping zero entries of a.
void sparse_lhs_gemm(const double* a, const double* b, double* c, std::size_t m,
                     std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double v = ai[p];
      if (v == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += v * bp[j];
    }
  }
}

// c[k,n] += a[m,k]^T * g[m,n], skipping zero entries of a.
void sparse_lhs_gemm_tn(const double* a, const double* g, double* c, std::size_t m,
                        std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    const double* gi = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double v = ai[p];
      if (v == 0.0) continue;
      double* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += v * gi[j];
    }
  }
}

int as_int(std::size_t v) { return static_cast<int>(v); }

// Splits a shape around `axis` into (outer, length, inner) strides.
struct AxisSplit {
  std::size_t outer = 1, length = 1, inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis, const char* op) {
  if (axis >= shape.size()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " invalid for shape " + shape_string(shape));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.length = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

Shape without_axis(const Shape& shape, std::size_t axis) {
  Shape out;
  for (std::size_t i = 0; i < shape.size(); ++i)
    if (i != axis) out.push_back(shape[i]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y, double) { return y; }, [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y, double) { return 1.0 / y; },
      [](double x, double y, double) { return -x / (y * y); });
}

// Ties send the gradient to the first operand.
Tensor maximum(const Tensor& a, const Tensor& b) {
  return binary(
      "maximum", a, b, [](double x, double y) { return x >= y ? x : y; },
      [](double x, double y, double) { return x >= y ? 1.0 : 0.0; },
      [](double x, double y, double) { return x >= y ? 0.0 : 1.0; });
}

Tensor add(const Tensor& a, double b) {
  return unary(a, [b](double x) { return x + b; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, double b) {
  return unary(a, [b](double x) { return x - b; }, [](double, double) { return 1.0; });
}

Tensor sub(double a, const Tensor& b) {
  return unary(b, [a](double x) { return a - x; }, [](double, double) { return -1.0; });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(a, [factor](double x) { return factor * x; },
               [factor](double, double) { return factor; });
}

Tensor neg(const Tensor& x) { return scale(x, -1.0); }

Tensor abs(const Tensor& x) {
  return unary(x, [](double v) { return std::fabs(v); },
               [](double v, double) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
}

Tensor arctan(const Tensor& x) {
  return unary(x, [](double v) { return std::atan(v); },
               [](double v, double) { return 1.0 / (1.0 + v * v); });
}

Tensor exp(const Tensor& x) {
  return unary(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return unary(x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor logistic(const Tensor& x) {
  return unary(x, logistic_value, [](double, double y) { return y * (1.0 - y); });
}

Tensor square(const Tensor& x) {
  return unary(x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor clip(const Tensor& x, double lo, double hi) {
  if (!(lo <= hi)) {
    throw RangeError("clip: lower bound " + std::to_string(lo) + " exceeds upper bound " +
                     std::to_string(hi));
  }
  return unary(x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
               [lo, hi](double v, double) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
}

Tensor map(const Tensor& x, const std::function<double(double)>& f,
           const std::function<double(double)>& df) {
  return unary(x, [&f](double v) { return f(v); }, [df](double v, double) { return df(v); });
}

Tensor heaviside(const Tensor& x, bool inclusive) {
  std::vector<double> out(x.size());
  const double* px = x.raw();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (inclusive ? px[i] >= 0.0 : px[i] > 0.0) ? 1.0 : 0.0;
  }
  return Tensor(x.shape(), std::move(out));
}

Tensor stop_gradient(const Tensor& x) { return Recorder::record_stop(x.detached(), x); }

// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: incompatible shapes " + shapes_of(a, b));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  const bool sparse = mostly_zero(a);
  std::vector<double> out(m * n, 0.0);
  if (sparse) {
    sparse_lhs_gemm(a.raw(), b.raw(), out.data(), m, k, n);
  } else {
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, as_int(m), as_int(n), as_int(k), 1.0,
                a.raw(), as_int(k), b.raw(), as_int(n), 0.0, out.data(), as_int(n));
  }
  Tensor result({m, n}, std::move(out));
  if (!a.requires_grad() && !b.requires_grad()) return result;
  return Recorder::record(
      result, {&a, &b},
      [m, k, n, sparse, av = a.detached(), bv = b.detached()](
          std::span<const double> g, std::span<const std::span<double>> gin) {
        if (!gin[0].empty()) {
          // dA += dC * B^T
          cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, as_int(m), as_int(k), as_int(n),
                      1.0, g.data(), as_int(n), bv.raw(), as_int(n), 1.0, gin[0].data(),
                      as_int(k));
        }
        if (!gin[1].empty()) {
          // dB += A^T * dC
          if (sparse) {
            sparse_lhs_gemm_tn(av.raw(), g.data(), gin[1].data(), m, k, n);
          } else {
            cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, as_int(k), as_int(n), as_int(m),
                        1.0, av.raw(), as_int(k), g.data(), as_int(n), 1.0, gin[1].data(),
                        as_int(n));
          }
        }
      });
}

// ---------------------------------------------------------------------------

Tensor sum(const Tensor& x) {
  const auto d = x.data();
  double total = 0.0;
  for (double v : d) total += v;
  Tensor result = Tensor::scalar(total);
  if (!x.requires_grad()) return result;
  return Recorder::record(result, {&x},
                          [](std::span<const double> g, std::span<const std::span<double>> gin) {
                            for (double& v : gin[0]) v += g[0];
                          });
}

Tensor sum(const Tensor& x, std::size_t axis) {
  const auto s = split_at(x.shape(), axis, "sum");
  std::vector<double> out(s.outer * s.inner, 0.0);
  const double* px = x.raw();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t l = 0; l < s.length; ++l)
      for (std::size_t j = 0; j < s.inner; ++j)
        out[o * s.inner + j] += px[(o * s.length + l) * s.inner + j];
  Tensor result(without_axis(x.shape(), axis), std::move(out));
  if (!x.requires_grad()) return result;
  return Recorder::record(result, {&x},
                          [s](std::span<const double> g, std::span<const std::span<double>> gin) {
                            double* gx = gin[0].data();
                            for (std::size_t o = 0; o < s.outer; ++o)
                              for (std::size_t l = 0; l < s.length; ++l)
                                for (std::size_t j = 0; j < s.inner; ++j)
                                  gx[(o * s.length + l) * s.inner + j] += g[o * s.inner + j];
                          });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.size())); }

Tensor mean(const Tensor& x, std::size_t axis) {
  const double n = static_cast<double>(x.dim(axis));
  return scale(sum(x, axis), 1.0 / n);
}

Tensor argmax_lastaxis(const Tensor& x) {
  if (x.rank() == 0) throw DimensionError("argmax_lastaxis: rank-0 tensor has no last axis");
  const std::size_t cols = x.shape().back();
  const std::size_t rows = x.size() / cols;
  std::vector<double> out(rows);
  const double* px = x.raw();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = px + r * cols;
    out[r] = static_cast<double>(std::max_element(row, row + cols) - row);
  }
  return Tensor(without_axis(x.shape(), x.rank() - 1), std::move(out));
}

// ---------------------------------------------------------------------------

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw DimensionError("reshape: cannot view " + shape_string(x.shape()) + " as " +
                         shape_string(shape));
  }
  Tensor result(std::move(shape), std::vector<double>(x.data().begin(), x.data().end()));
  if (!x.requires_grad()) return result;
  return Recorder::record(result, {&x},
                          [](std::span<const double> g, std::span<const std::span<double>> gin) {
                            for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i];
                          });
}

Tensor index(const Tensor& x, std::size_t i) {
  if (x.rank() == 0 || i >= x.dim(0)) {
    throw DimensionError("index: " + std::to_string(i) + " out of range for shape " +
                         shape_string(x.shape()));
  }
  const std::size_t inner = x.size() / x.dim(0);
  const auto begin = x.data().begin() + static_cast<std::ptrdiff_t>(i * inner);
  Tensor result(Shape(x.shape().begin() + 1, x.shape().end()),
                std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(inner)));
  if (!x.requires_grad()) return result;
  return Recorder::record(
      result, {&x},
      [offset = i * inner](std::span<const double> g, std::span<const std::span<double>> gin) {
        for (std::size_t j = 0; j < g.size(); ++j) gin[0][offset + j] += g[j];
      });
}

Tensor stack(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("stack: no tensors given");
  const Shape& item = parts.front().shape();
  const std::size_t inner = parts.front().size();
  std::vector<double> out;
  out.reserve(inner * parts.size());
  std::vector<const Tensor*> inputs;
  bool tracked = false;
  for (const auto& p : parts) {
    if (p.shape() != item) {
      throw DimensionError("stack: mismatched shapes " + shapes_of(parts.front(), p));
    }
    out.insert(out.end(), p.data().begin(), p.data().end());
    inputs.push_back(&p);
    tracked = tracked || p.requires_grad();
  }
  Shape shape{parts.size()};
  shape.insert(shape.end(), item.begin(), item.end());
  Tensor result(std::move(shape), std::move(out));
  if (!tracked) return result;
  return Recorder::record(result, inputs,
                          [inner](std::span<const double> g, std::span<const std::span<double>> gin) {
                            for (std::size_t k = 0; k < gin.size(); ++k) {
                              if (gin[k].empty()) continue;
                              for (std::size_t j = 0; j < inner; ++j) gin[k][j] += g[k * inner + j];
                            }
                          });
}

Tensor log_softmax(const Tensor& x) {
  if (x.rank() == 0) throw DimensionError("log_softmax: rank-0 tensor has no last axis");
  const std::size_t cols = x.shape().back();
  const std::size_t rows = x.size() / cols;
  std::vector<double> out(x.size());
  const double* px = x.raw();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = px + r * cols;
    const double top = *std::max_element(row, row + cols);
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += std::exp(row[c] - top);
    const double lse = top + std::log(acc);
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = row[c] - lse;
  }
  Tensor result(x.shape(), std::move(out));
  if (!x.requires_grad()) return result;
  return Recorder::record(
      result, {&x},
      [rows, cols, ov = result.detached()](std::span<const double> g,
                                           std::span<const std::span<double>> gin) {
        const double* py = ov.raw();
        double* gx = gin[0].data();
        for (std::size_t r = 0; r < rows; ++r) {
          double gsum = 0.0;
          for (std::size_t c = 0; c < cols; ++c) gsum += g[r * cols + c];
          for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t i = r * cols + c;
            gx[i] += g[i] - std::exp(py[i]) * gsum;
          }
        }
      });
}

Tensor pick(const Tensor& x, std::span<const std::size_t> cols_of) {
  if (x.rank() != 2 || cols_of.size() != x.dim(0)) {
    throw DimensionError("pick: need a [rows, cols] tensor and one column per row, got " +
                         shape_string(x.shape()) + " with " + std::to_string(cols_of.size()) +
                         " columns");
  }
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  std::vector<std::size_t> idx(cols_of.begin(), cols_of.end());
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (idx[r] >= cols) {
      throw RangeError("pick: column " + std::to_string(idx[r]) + " out of range [0, " +
                       std::to_string(cols) + ")");
    }
    out[r] = x[r * cols + idx[r]];
  }
  Tensor result({rows}, std::move(out));
  if (!x.requires_grad()) return result;
  return Recorder::record(
      result, {&x},
      [cols, idx = std::move(idx)](std::span<const double> g,
                                   std::span<const std::span<double>> gin) {
        for (std::size_t r = 0; r < idx.size(); ++r) gin[0][r * cols + idx[r]] += g[r];
      });
}

}  // namespace spikekit
