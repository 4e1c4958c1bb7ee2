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

#include <numeric>
#include <sstream>
#include <utility>

#include "autodiff.hpp"
#include "spikekit/error.hpp"
#include "spikekit/tape.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor() : data_(std::make_shared<const std::vector<double>>(1, 0.0)) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)) {
  for (auto d : shape_) {
    if (d == 0) {
      throw DimensionError("tensor dimensions must be positive, got " +
                           shape_string(shape_));
    }
  }
  if (shape_size(shape_) != data.size()) {
    throw DimensionError("shape " + shape_string(shape_) + " needs " +
                         std::to_string(shape_size(shape_)) + " values, got " +
                         std::to_string(data.size()));
  }
  data_ = std::make_shared<const std::vector<double>>(std::move(data));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value) {
  const auto n = shape_size(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_string(shape_));
  }
  return shape_[axis];
}

double Tensor::item() const {
  if (size() != 1) {
    throw DimensionError("item() needs a one-element tensor, got shape " +
                         shape_string(shape_));
  }
  return (*data_)[0];
}

double Tensor::at(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw DimensionError("index rank does not match shape " + shape_string(shape_));
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) {
      throw DimensionError("index out of range for shape " + shape_string(shape_));
    }
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return (*data_)[flat];
}

bool Tensor::requires_grad() const { return node_ != kNoNode && !tape_.expired(); }

Tensor Tensor::detached() const {
  Tensor t;
  t.shape_ = shape_;
  t.data_ = data_;
  return t;
}

// ---------------------------------------------------------------------------

namespace detail {

Tensor Recorder::record(Tensor out, std::span<const Tensor* const> inputs,
                        BackwardFn backward) {
  std::shared_ptr<TapeState> tape;
  for (const Tensor* in : inputs) {
    if (in->node_ == kNoNode) continue;
    auto live = in->tape_.lock();
    if (!live) continue;
    if (tape && tape != live) {
      throw ContractError("operands are recorded on different tapes");
    }
    tape = std::move(live);
  }
  if (!tape) return out;

  Node node;
  node.inputs.reserve(inputs.size());
  for (const Tensor* in : inputs) {
    const bool tracked = in->node_ != kNoNode && in->tape_.lock() == tape;
    node.inputs.push_back(tracked ? in->node_ : kNoNode);
  }
  node.backward = std::move(backward);
  node.shape = out.shape_;
  tape->nodes.push_back(std::move(node));
  out.tape_ = tape;
  out.node_ = tape->nodes.size() - 1;
  return out;
}

Tensor Recorder::record_stop(Tensor out, const Tensor& input) {
  auto tape = input.tape_.lock();
  if (!tape || input.node_ == kNoNode) return out;
  Node node;
  node.inputs = {input.node_};
  node.shape = out.shape_;
  tape->nodes.push_back(std::move(node));
  out.tape_ = tape;
  out.node_ = tape->nodes.size() - 1;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

Tape::Tape() : state_(std::make_shared<detail::TapeState>()) {}

void Tape::watch(Tensor& t) {
  if (t.node_ != Tensor::kNoNode) {
    auto live = t.tape_.lock();
    if (live == state_) return;
    if (live) throw ContractError("tensor is already watched by another live tape");
  }
  detail::Node node;
  node.shape = t.shape_;
  node.leaf = true;
  state_->nodes.push_back(std::move(node));
  t.tape_ = state_;
  t.node_ = state_->nodes.size() - 1;
}

std::size_t Tape::num_nodes() const { return state_->nodes.size(); }

Tensor Gradients::operator[](const Tensor& t) const {
  if (t.node_ != Tensor::kNoNode && t.tape_.lock() == tape_.lock()) {
    if (auto it = by_node_.find(t.node_); it != by_node_.end()) return it->second;
  }
  return Tensor::zeros(t.shape());
}

bool Gradients::contains(const Tensor& t) const {
  return t.node_ != Tensor::kNoNode && t.tape_.lock() == tape_.lock() &&
         by_node_.count(t.node_) > 0;
}

Gradients backward(const Tape& tape, const Tensor& loss) {
  if (loss.size() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " +
                        shape_string(loss.shape()));
  }
  Gradients result;
  result.tape_ = tape.state_;
  const auto& nodes = tape.state_->nodes;
  if (loss.node_ == Tensor::kNoNode || loss.tape_.lock() != tape.state_) return result;

  std::vector<std::vector<double>> grads(nodes.size());
  grads[loss.node_].assign(1, 1.0);
  std::vector<std::span<double>> in_spans;
  for (std::size_t i = loss.node_ + 1; i-- > 0;) {
    auto& g = grads[i];
    if (g.empty()) continue;
    const auto& node = nodes[i];
    if (node.leaf) {
      result.by_node_.emplace(i, Tensor(node.shape, std::move(g)));
      continue;
    }
    if (node.backward) {
      in_spans.assign(node.inputs.size(), {});
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        const auto id = node.inputs[k];
        if (id == Tensor::kNoNode) continue;
        if (grads[id].empty()) grads[id].assign(shape_size(nodes[id].shape), 0.0);
        in_spans[k] = grads[id];
      }
      node.backward(g, in_spans);
    }
    std::vector<double>().swap(g);
  }
  return result;
}

}  // namespace spikekit
