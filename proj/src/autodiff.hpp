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
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "spikekit/tape.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit::detail {

// grad_in[i] is empty when input i is not tracked; rules must accumulate (+=)
// because two inputs may alias the same buffer (e.g. mul(x, x)).
using BackwardFn = std::function<void(std::span<const double> grad_out,
                                      std::span<const std::span<double>> grad_in)>;

struct Node {
  std::vector<std::size_t> inputs;
  BackwardFn backward;  // empty for leaves and stop-gradient nodes
  Shape shape;
  bool leaf = false;
};

struct TapeState {
  std::vector<Node> nodes;
};

struct Recorder {
  static constexpr std::size_t kNoNode = Tensor::kNoNode;

  // Attaches `out` to the tape shared by the tracked inputs, if any.
  static Tensor record(Tensor out, std::span<const Tensor* const> inputs,
                       BackwardFn backward);
  static Tensor record(Tensor out, std::initializer_list<const Tensor*> inputs,
                       BackwardFn backward) {
    return record(std::move(out), std::span<const Tensor* const>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }
  // Records a node whose output passes no gradient to its inputs.
  static Tensor record_stop(Tensor out, const Tensor& input);

  static std::size_t node_of(const Tensor& t) { return t.node_; }
};

}  // namespace spikekit::detail
