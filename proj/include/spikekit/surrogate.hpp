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

#include <functional>
#include <string>
#include <string_view>

#include "spikekit/tensor.hpp"

namespace spikekit {

enum class SurrogateKind { fast_sigmoid, arctan, straight_through, custom };

/// A smooth stand-in for the unit step, used on the backward pass.
///
/// Built-ins:
///   fast_sigmoid      k x / (2 (1 + k|x|)) + 1/2
///   arctan            arctan(alpha x) / pi + 1/2
///   straight_through  clip(s x + 1/2, 0, 1)
/// A custom surrogate supplies its own function and derivative; the
/// derivative is trusted as given. Custom functions should map into [0, 1]
/// so the spike forward stays exactly binary.
struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::fast_sigmoid;
  double k = 25.0;
  double alpha = 2.0;
  double s = 1.0;
  std::function<double(double)> custom_forward;
  std::function<double(double)> custom_derivative;

  static SurrogateSpec fast_sigmoid(double k = 25.0);
  static SurrogateSpec arctan(double alpha = 2.0);
  static SurrogateSpec straight_through(double s = 1.0);
  static SurrogateSpec custom(std::function<double(double)> forward,
                              std::function<double(double)> derivative);

  /// Throws RangeError for nonpositive slopes, ContractError for a custom
  /// spec without both functions.
  void validate() const;
  std::string name() const;

  double value(double x) const;
  double derivative(double x) const;
};

/// "fast_sigmoid", "arctan" or "straight_through" with default slopes.
SurrogateSpec parse_surrogate(std::string_view name);

/// sigma~(x), differentiable.
Tensor smooth_forward(const SurrogateSpec& spec, const Tensor& x);
/// d sigma~ / dx as plain values.
Tensor smooth_gradient(const SurrogateSpec& spec, const Tensor& x);

/// stop_gradient(step(x) - sigma~(x)) + sigma~(x): exactly the unit step on
/// the forward pass, exactly sigma~' on the backward pass. The step is
/// x > 0, or x >= 0 with `inclusive`.
Tensor ste_spike(const SurrogateSpec& spec, const Tensor& x, bool inclusive = false);

}  // namespace spikekit
