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

#include "spikekit/rng.hpp"

#include <cmath>
#include <numbers>

namespace spikekit {

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling against the largest multiple of bound.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

Tensor rng_uniform(Rng& rng, const Shape& shape) { return rng_uniform(rng, shape, 0.0, 1.0); }

Tensor rng_uniform(Rng& rng, const Shape& shape, double lo, double hi) {
  std::vector<double> out(shape_size(shape));
  for (auto& v : out) v = lo + (hi - lo) * rng.uniform();
  return Tensor(shape, std::move(out));
}

Tensor rng_normal(Rng& rng, const Shape& shape, double stddev) {
  std::vector<double> out(shape_size(shape));
  for (auto& v : out) v = stddev * rng.normal();
  return Tensor(shape, std::move(out));
}

}  // namespace spikekit
