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

#include <bit>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "spikekit/ops.hpp"
#include "spikekit/rng.hpp"
#include "spikekit/tape.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit::testing {

using Fn = std::function<Tensor(const std::vector<Tensor>&)>;

inline std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

inline Tensor uniform_tensor(std::mt19937_64& gen, const Shape& shape, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(shape_size(shape));
  for (auto& x : v) x = dist(gen);
  return Tensor(shape, std::move(v));
}

// Gradients of the scalar fn(inputs) with respect to every input.
inline std::vector<std::vector<double>> tape_gradients(const Fn& fn, std::vector<Tensor> inputs) {
  Tape tape;
  for (auto& x : inputs) tape.watch(x);
  const Tensor loss = fn(inputs);
  const Gradients g = backward(tape, loss);
  std::vector<std::vector<double>> out;
  for (const auto& x : inputs) out.push_back(values(g[x]));
  return out;
}

inline std::vector<std::vector<double>> fd_gradients(const Fn& fn, const std::vector<Tensor>& inputs,
                                                   double h = 1e-5) {
  std::vector<std::vector<double>> out;
  for (std::size_t a = 0; a < inputs.size(); ++a) {
    std::vector<double> g(inputs[a].size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto eval = [&](double delta) {
        std::vector<Tensor> shifted = inputs;
        std::vector<double> v = values(inputs[a]);
        v[i] += delta;
        shifted[a] = Tensor(inputs[a].shape(), std::move(v));
        return fn(shifted).item();
      };
      g[i] = (eval(h) - eval(-h)) / (2.0 * h);
    }
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<double> flatten(const std::vector<std::vector<double>>& parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::uint64_t checksum(const Tensor& t) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : t.data()) {
    h ^= std::bit_cast<std::uint64_t>(v);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("spikekit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path mnist_dir() {
#ifdef SPIKEKIT_TEST_DATA_DIR
  return SPIKEKIT_TEST_DATA_DIR;
#else
  return {};
#endif
}

inline bool mnist_available() {
  const auto dir = mnist_dir();
  if (dir.empty()) return false;
  for (const char* f : {"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                        "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"}) {
    if (!std::filesystem::exists(dir / f) &&
        !std::filesystem::exists(dir / (std::string(f) + ".gz"))) {
      return false;
    }
  }
  return true;
}

}  // namespace spikekit::testing
