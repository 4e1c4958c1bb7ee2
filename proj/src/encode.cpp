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

#include "spikekit/encode.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spikekit/error.hpp"

namespace spikekit {
namespace {

void require_unit_interval(const Tensor& x, const char* what) {
  for (double v : x.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      const auto [lo, hi] = std::minmax_element(x.data().begin(), x.data().end());
      throw RangeError(std::string(what) + ": inputs must lie in [0, 1], got values in [" +
                       std::to_string(*lo) + ", " + std::to_string(*hi) + "]");
    }
  }
}

Shape time_first(std::size_t steps, const Shape& item) {
  Shape shape{steps};
  shape.insert(shape.end(), item.begin(), item.end());
  return shape;
}

SpikeTrain make_train(std::size_t steps, const Shape& item, std::vector<double> data) {
  return {Tensor(time_first(steps, item), std::move(data)), steps};
}

// 0 and 1 are certain outcomes and consume no draw.
double bernoulli(double p, Rng& rng) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return rng.uniform() < p ? 1.0 : 0.0;
}

}  // namespace

SpikeTrain rate_encode(const Tensor& x, std::size_t num_steps, Rng& rng) {
  require_unit_interval(x, "rate_encode");
  if (num_steps == 0) return {};
  const std::size_t n = x.size();
  std::vector<double> out(num_steps * n);
  const double* px = x.raw();
  for (std::size_t t = 0; t < num_steps; ++t) {
    double* row = out.data() + t * n;
    for (std::size_t i = 0; i < n; ++i) row[i] = bernoulli(px[i], rng);
  }
  return make_train(num_steps, x.shape(), std::move(out));
}

SpikeTrain latency_encode(const Tensor& x, std::size_t num_steps, LatencyMapping mapping,
                          double tau) {
  require_unit_interval(x, "latency_encode");
  if (num_steps == 0) throw RangeError("latency_encode: num_steps must be >= 1");
  if (mapping == LatencyMapping::exponential && !(tau > 0)) {
    throw RangeError("latency_encode: tau must be > 0");
  }
  const std::size_t n = x.size();
  const double last = static_cast<double>(num_steps - 1);
  const double eps = 1.0 / static_cast<double>(num_steps);
  std::vector<double> out(num_steps * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i];
    double t = 0.0;
    if (mapping == LatencyMapping::linear) {
      t = std::round((1.0 - v) * last);
    } else {
      t = std::clamp(std::round(tau * std::log(1.0 / std::max(v, eps))), 0.0, last);
    }
    out[static_cast<std::size_t>(t) * n + i] = 1.0;
  }
  return make_train(num_steps, x.shape(), std::move(out));
}

SpikeTrain delta_encode(const Tensor& x, double threshold, bool signed_output) {
  if (!(threshold > 0)) {
    throw RangeError("delta_encode: threshold must be > 0, got " + std::to_string(threshold));
  }
  if (x.rank() == 0) throw DimensionError("delta_encode: input needs a leading time axis");
  const std::size_t steps = x.dim(0);
  const std::size_t n = x.size() / steps;
  const Shape item(x.shape().begin() + 1, x.shape().end());
  const std::size_t width = signed_output ? 2 : 1;
  std::vector<double> out(steps * n * width, 0.0);
  const double* px = x.raw();
  for (std::size_t t = 1; t < steps; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double change = px[t * n + i] - px[(t - 1) * n + i];
      const std::size_t at = (t * n + i) * width;
      if (!signed_output) {
        if (std::fabs(change) > threshold) out[at] = 1.0;
      } else if (change > threshold) {
        out[at] = 1.0;
      } else if (change < -threshold) {
        out[at + 1] = 1.0;
      }
    }
  }
  Shape out_item = item;
  if (signed_output) out_item.push_back(2);
  return make_train(steps, out_item, std::move(out));
}

SpikeTrain eeg_encode(const Tensor& x, const EegParams& params, Rng* rng) {
  if (x.rank() != 2) {
    throw DimensionError("eeg_encode: expected [T, channels], got " + shape_string(x.shape()));
  }
  const std::size_t steps = x.dim(0);
  const std::size_t channels = x.dim(1);
  const double* px = x.raw();

  switch (params.method) {
    case EegMethod::delta:
      return delta_encode(x, params.delta_threshold, params.signed_output);

    case EegMethod::rate: {
      if (rng == nullptr) throw ContractError("eeg_encode: the rate method needs an rng");
      std::vector<double> scaled(x.size(), 0.0);
      for (std::size_t c = 0; c < channels; ++c) {
        double lo = px[c], hi = px[c];
        for (std::size_t t = 0; t < steps; ++t) {
          lo = std::min(lo, px[t * channels + c]);
          hi = std::max(hi, px[t * channels + c]);
        }
        if (hi == lo) continue;
        for (std::size_t t = 0; t < steps; ++t) {
          scaled[t * channels + c] = (px[t * channels + c] - lo) / (hi - lo);
        }
      }
      std::vector<double> out(x.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = bernoulli(scaled[i], *rng);
      return make_train(steps, {channels}, std::move(out));
    }

    case EegMethod::threshold_crossing: {
      std::vector<double> out(x.size(), 0.0);
      for (std::size_t c = 0; c < channels; ++c) {
        double mean = 0.0;
        for (std::size_t t = 0; t < steps; ++t) mean += px[t * channels + c];
        mean /= static_cast<double>(steps);
        double var = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
          const double d = px[t * channels + c] - mean;
          var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(steps));
        if (sd == 0.0) continue;
        const double level = mean + params.gain * sd;
        for (std::size_t t = 1; t < steps; ++t) {
          if (px[(t - 1) * channels + c] <= level && px[t * channels + c] > level) {
            out[t * channels + c] = 1.0;
          }
        }
      }
      return make_train(steps, {channels}, std::move(out));
    }
  }
  throw ContractError("eeg_encode: unhandled method");
}

}  // namespace spikekit
