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
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spikekit {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

class Tape;
class Gradients;

namespace detail {
struct TapeState;
struct Recorder;
}  // namespace detail

/// Dense row-major array of doubles.
///
/// The shape and the data buffer never change after construction; every
/// operation returns a new Tensor. A Tensor may additionally be bound to a
/// live Tape (see tape.hpp), in which case operations on it are recorded
/// for reverse-mode differentiation. The binding lives on the handle, not
/// on the data, so copies of one buffer can be tracked and untracked
/// independently.
class Tensor {
 public:
  /// Rank-0 scalar holding 0.
  Tensor();
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return data_->size(); }
  std::span<const double> data() const noexcept { return *data_; }
  const double* raw() const noexcept { return data_->data(); }

  /// Value of a one-element tensor.
  double item() const;
  double at(std::initializer_list<std::size_t> index) const;
  double operator[](std::size_t flat) const { return (*data_)[flat]; }

  /// True while the handle is bound to a live tape.
  bool requires_grad() const;

  /// Same values, detached from any tape.
  Tensor detached() const;

 private:
  static constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

  Shape shape_;
  std::shared_ptr<const std::vector<double>> data_;
  std::weak_ptr<detail::TapeState> tape_;
  std::size_t node_ = kNoNode;

  friend class Tape;
  friend class Gradients;
  friend struct detail::Recorder;
  friend Gradients backward(const Tape& tape, const Tensor& loss);
};

}  // namespace spikekit
