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

#include "spikekit/rng.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

/// Binary raster with time as the leading axis: [T, B, ...]. Tensors have
/// no zero-length axes, so an empty train (num_steps == 0) carries a
/// placeholder scalar in `data`.
struct SpikeTrain {
  Tensor data;
  std::size_t num_steps = 0;
  bool empty() const { return num_steps == 0; }
};

/// Bernoulli spikes: each element fires at each step with probability x.
/// x must lie in [0, 1]. num_steps == 0 yields an empty train.
SpikeTrain rate_encode(const Tensor& x, std::size_t num_steps, Rng& rng);

enum class LatencyMapping { linear, exponential };

/// One spike per element; larger values fire earlier.
///   linear:      t = round((1 - x) (T - 1))
///   exponential: t = round(tau ln(1 / max(x, 1/T))), clamped to [0, T-1]
SpikeTrain latency_encode(const Tensor& x, std::size_t num_steps,
                          LatencyMapping mapping = LatencyMapping::linear, double tau = 5.0);

/// Spikes where |x[t] - x[t-1]| > threshold along the leading (time) axis of
/// x; never at t = 0. With `signed_output` a trailing axis of size 2 is
/// appended holding (increase, decrease) spikes.
SpikeTrain delta_encode(const Tensor& x, double threshold, bool signed_output = false);

enum class EegMethod { rate, delta, threshold_crossing };

struct EegParams {
  EegMethod method = EegMethod::threshold_crossing;
  double delta_threshold = 0.1;  // delta
  bool signed_output = false;    // delta
  double gain = 1.0;             // threshold_crossing: level = mean + gain * std
};

/// Multi-channel encoder for x of shape [T, channels].
///   rate                per-channel min-max scaling to [0, 1], then one
///                       Bernoulli draw per sample (a flat channel maps to 0)
///   delta               delta_encode on each channel
///   threshold_crossing  a spike at t >= 1 where the channel rises through
///                       mean + gain * std of the whole window; flat
///                       channels never spike
/// `rng` is only used by the rate method.
SpikeTrain eeg_encode(const Tensor& x, const EegParams& params, Rng* rng = nullptr);

}  // namespace spikekit
