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

#include "spikekit/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spikekit/error.hpp"
#include "spikekit/ops.hpp"

namespace spikekit {

SurrogateSpec SurrogateSpec::fast_sigmoid(double k) {
  SurrogateSpec spec;
  spec.kind = SurrogateKind::fast_sigmoid;
  spec.k = k;
  return spec;
}

SurrogateSpec SurrogateSpec::arctan(double alpha) {
  SurrogateSpec spec;
  spec.kind = SurrogateKind::arctan;
  spec.alpha = alpha;
  return spec;
}

SurrogateSpec SurrogateSpec::straight_through(double s) {
  SurrogateSpec spec;
  spec.kind = SurrogateKind::straight_through;
  spec.s = s;
  return spec;
}

SurrogateSpec SurrogateSpec::custom(std::function<double(double)> forward,
                                    std::function<double(double)> derivative) {
  SurrogateSpec spec;
  spec.kind = SurrogateKind::custom;
  spec.custom_forward = std::move(forward);
  spec.custom_derivative = std::move(derivative);
  return spec;
}

void SurrogateSpec::validate() const {
  switch (kind) {
    case SurrogateKind::fast_sigmoid:
      if (!(k > 0)) throw RangeError("fast_sigmoid slope k must be > 0");
      break;
    case SurrogateKind::arctan:
      if (!(alpha > 0)) throw RangeError("arctan width alpha must be > 0");
      break;
    case SurrogateKind::straight_through:
      if (!(s > 0)) throw RangeError("straight_through slope s must be > 0");
      break;
    case SurrogateKind::custom:
      if (!custom_forward || !custom_derivative) {
        throw ContractError("custom surrogate needs both a function and its derivative");
      }
      break;
  }
}

std::string SurrogateSpec::name() const {
  switch (kind) {
    case SurrogateKind::fast_sigmoid: return "fast_sigmoid";
    case SurrogateKind::arctan: return "arctan";
    case SurrogateKind::straight_through: return "straight_through";
    case SurrogateKind::custom: return "custom";
  }
  return "unknown";
}

double SurrogateSpec::value(double x) const {
  switch (kind) {
    case SurrogateKind::fast_sigmoid:
      return k * x / (2.0 * (1.0 + k * std::fabs(x))) + 0.5;
    case SurrogateKind::arctan:
      return std::atan(alpha * x) / std::numbers::pi + 0.5;
    case SurrogateKind::straight_through:
      return std::clamp(s * x + 0.5, 0.0, 1.0);
    case SurrogateKind::custom:
      return custom_forward(x);
  }
  return 0.0;
}

double SurrogateSpec::derivative(double x) const {
  switch (kind) {
    case SurrogateKind::fast_sigmoid: {
      const double d = 1.0 + k * std::fabs(x);
      return k / (2.0 * d * d);
    }
    case SurrogateKind::arctan:
      return alpha / (std::numbers::pi * (1.0 + alpha * alpha * x * x));
    case SurrogateKind::straight_through: {
      // Open window: the clip kinks themselves get 0.
      const double u = s * x + 0.5;
      return (u > 0.0 && u < 1.0) ? s : 0.0;
    }
    case SurrogateKind::custom:
      return custom_derivative(x);
  }
  return 0.0;
}

SurrogateSpec parse_surrogate(std::string_view name) {
  if (name == "fast_sigmoid") return SurrogateSpec::fast_sigmoid();
  if (name == "arctan") return SurrogateSpec::arctan();
  if (name == "straight_through") return SurrogateSpec::straight_through();
  throw UsageError("unknown surrogate '" + std::string(name) +
                   "' (expected fast_sigmoid, arctan or straight_through)");
}

Tensor smooth_forward(const SurrogateSpec& spec, const Tensor& x) {
  return map(
      x, [&spec](double v) { return spec.value(v); },
      [spec](double v) { return spec.derivative(v); });
}

Tensor smooth_gradient(const SurrogateSpec& spec, const Tensor& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.derivative(x[i]);
  return Tensor(x.shape(), std::move(out));
}

Tensor ste_spike(const SurrogateSpec& spec, const Tensor& x, bool inclusive) {
  const Tensor smooth = smooth_forward(spec, x);
  return add(stop_gradient(sub(heaviside(x, inclusive), smooth)), smooth);
}

}  // namespace spikekit
