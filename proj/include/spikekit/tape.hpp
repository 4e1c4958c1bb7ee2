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
#include <memory>
#include <unordered_map>

#include "spikekit/tensor.hpp"

namespace spikekit {

Gradients backward(const Tape& tape, const Tensor& loss);

/// Record-on-execute operation graph for one forward/backward pass.
///
/// Nodes are appended in execution order, so the node list is already
/// topologically sorted. A tape is single-threaded; create one per
/// training step and drop it afterwards.
class Tape {
 public:
  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) noexcept = default;
  Tape& operator=(Tape&&) noexcept = default;

  /// Binds `t` to this tape as a differentiable leaf. Throws ContractError
  /// if `t` is already bound to a different live tape.
  void watch(Tensor& t);

  std::size_t num_nodes() const;

 private:
  std::shared_ptr<detail::TapeState> state_;
  friend Gradients backward(const Tape& tape, const Tensor& loss);
  friend class Gradients;
};

/// Gradients of one scalar loss with respect to the watched leaves of a tape.
class Gradients {
 public:
  /// Gradient for `t`; a zero tensor of `t`'s shape when `t` is not a
  /// watched leaf or does not influence the loss.
  Tensor operator[](const Tensor& t) const;
  bool contains(const Tensor& t) const;

 private:
  std::weak_ptr<detail::TapeState> tape_;
  std::unordered_map<std::size_t, Tensor> by_node_;
  friend Gradients backward(const Tape& tape, const Tensor& loss);
};

/// Reverse sweep from `loss` (which must hold exactly one element). The tape
/// is left untouched, so calling this twice yields identical results.
Gradients backward(const Tape& tape, const Tensor& loss);

}  // namespace spikekit
