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

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spikekit/tensor.hpp"

namespace spikekit {

// Differentiable operations. Binary elementwise operations accept equal
// shapes, a one-element operand on either side (broadcast over all
// elements), or a rank-1 row vector whose length matches the last axis of
// the other operand (bias addition). Anything else is a DimensionError.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor maximum(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, double b);
Tensor sub(const Tensor& a, double b);
Tensor sub(double a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

Tensor neg(const Tensor& x);
/// Gradient at 0 is 0.
Tensor abs(const Tensor& x);
Tensor arctan(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor logistic(const Tensor& x);
Tensor square(const Tensor& x);
/// Gradient 1 on [lo, hi], 0 outside. Requires lo <= hi.
Tensor clip(const Tensor& x, double lo, double hi);

/// Elementwise f with caller-supplied derivative df.
Tensor map(const Tensor& x, const std::function<double(double)>& f,
           const std::function<double(double)>& df);

/// Unit step: 1 where x > 0 (or x >= 0 when `inclusive`), else 0. The
/// result carries no gradient.
Tensor heaviside(const Tensor& x, bool inclusive = false);

/// Forward identity; blocks all gradient flow into `x`.
Tensor stop_gradient(const Tensor& x);

/// [m,k] x [k,n] -> [m,n]. Operands whose entries are mostly zero (spike
/// rasters) are multiplied by skipping zeros; the rest goes through BLAS.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor sum(const Tensor& x);
Tensor sum(const Tensor& x, std::size_t axis);
Tensor mean(const Tensor& x);
Tensor mean(const Tensor& x, std::size_t axis);
/// Index of the largest entry along the last axis, lowest index on ties.
/// Not differentiable.
Tensor argmax_lastaxis(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);
/// x[i] along the leading axis.
Tensor index(const Tensor& x, std::size_t i);
/// Stacks equally shaped tensors along a new leading axis.
Tensor stack(std::span<const Tensor> parts);

/// Numerically stable log-softmax along the last axis.
Tensor log_softmax(const Tensor& x);
/// For a [rows, cols] tensor, out[r] = x[r, cols_of[r]].
Tensor pick(const Tensor& x, std::span<const std::size_t> cols_of);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator+(const Tensor& a, double b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, double b) { return sub(a, b); }
inline Tensor operator-(double a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, double b) { return scale(a, b); }
inline Tensor operator*(double a, const Tensor& b) { return scale(b, a); }
inline Tensor operator-(const Tensor& x) { return neg(x); }

}  // namespace spikekit
