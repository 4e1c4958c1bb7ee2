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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracle/oracle.hpp"
#include "spikekit/error.hpp"
#include "spikekit/ops.hpp"
#include "spikekit/surrogate.hpp"
#include "spikekit/tape.hpp"
#include "support.hpp"

namespace spikekit {
namespace {

oracle::SurrogateParams to_oracle(const SurrogateSpec& s) {
  oracle::SurrogateParams p;
  p.kind = s.kind == SurrogateKind::arctan            ? oracle::Surrogate::arctan
           : s.kind == SurrogateKind::straight_through ? oracle::Surrogate::straight_through
                                                       : oracle::Surrogate::fast_sigmoid;
  p.k = s.k;
  p.alpha = s.alpha;
  p.s = s.s;
  return p;
}

std::vector<SurrogateSpec> builtins() {
  return {SurrogateSpec::fast_sigmoid(25.0), SurrogateSpec::arctan(2.0),
          SurrogateSpec::straight_through(1.0), SurrogateSpec::fast_sigmoid(3.0),
          SurrogateSpec::arctan(0.5), SurrogateSpec::straight_through(2.5)};
}

TEST(Surrogate, ForwardExamples) {
  EXPECT_DOUBLE_EQ(SurrogateSpec::fast_sigmoid().value(0.0), 0.5);
  EXPECT_DOUBLE_EQ(SurrogateSpec::arctan().value(0.0), 0.5);
  EXPECT_DOUBLE_EQ(SurrogateSpec::straight_through().value(0.7), 1.0);
  EXPECT_DOUBLE_EQ(smooth_forward(SurrogateSpec::straight_through(), Tensor::scalar(0.7)).item(),
                   1.0);
}

TEST(Surrogate, GradientExamples) {
  auto grad = [](const SurrogateSpec& s, double x) {
    return smooth_gradient(s, Tensor::scalar(x)).item();
  };
  EXPECT_DOUBLE_EQ(grad(SurrogateSpec::fast_sigmoid(25.0), 0.0), 12.5);
  EXPECT_NEAR(grad(SurrogateSpec::arctan(2.0), 0.0), 2.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(grad(SurrogateSpec::arctan(2.0), 0.0), 0.63662, 1e-5);
  EXPECT_DOUBLE_EQ(grad(SurrogateSpec::straight_through(1.0), 0.7), 0.0);
  EXPECT_DOUBLE_EQ(grad(SurrogateSpec::straight_through(1.0), 0.2), 1.0);
  // Clip boundaries take the zero subgradient.
  EXPECT_DOUBLE_EQ(grad(SurrogateSpec::straight_through(1.0), 0.5), 0.0);
  EXPECT_DOUBLE_EQ(grad(SurrogateSpec::straight_through(1.0), -0.5), 0.0);
}

TEST(Surrogate, MatchesClosedFormOracle) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> dist(-3, 3);
  for (const auto& s : builtins()) {
    const auto p = to_oracle(s);
    for (int i = 0; i < 1000; ++i) {
      const double x = dist(gen);
      EXPECT_NEAR(s.value(x), oracle::smooth(p, x), 1e-15);
      EXPECT_NEAR(s.derivative(x), oracle::smooth_derivative(p, x), 1e-13);
    }
  }
}

TEST(Surrogate, GradientMatchesFiniteDifferencesOfForward) {
  std::mt19937_64 gen(37);
  std::uniform_real_distribution<double> dist(-2, 2);
  const double h = 1e-6;
  for (const auto& s : builtins()) {
    for (int i = 0; i < 1000; ++i) {
      const double x = dist(gen);
      if (s.kind == SurrogateKind::straight_through) {
        const double z = s.s * x + 0.5;
        if (std::fabs(z) < 1e-3 || std::fabs(z - 1.0) < 1e-3) continue;
      }
      // The fast sigmoid's second derivative jumps at 0.
      if (s.kind == SurrogateKind::fast_sigmoid && std::fabs(x) < 1e-3) continue;
      const double fd = (s.value(x + h) - s.value(x - h)) / (2 * h);
      const double g = smooth_gradient(s, Tensor::scalar(x)).item();
      EXPECT_LE(std::fabs(g - fd), 1e-6 * std::max(1.0, std::fabs(g))) << s.name() << " x=" << x;
    }
  }
}

TEST(Surrogate, CentredAndMonotone) {
  for (const auto& s : builtins()) {
    EXPECT_DOUBLE_EQ(s.value(0.0), 0.5) << s.name();
    double prev = s.value(-5.0);
    for (int i = 1; i <= 2000; ++i) {
      const double v = s.value(-5.0 + 10.0 * i / 2000.0);
      EXPECT_GE(v, prev) << s.name();
      prev = v;
    }
  }
}

TEST(Surrogate, ValidationAndParsing) {
  EXPECT_THROW(SurrogateSpec::fast_sigmoid(0.0).validate(), RangeError);
  EXPECT_THROW(SurrogateSpec::arctan(-1.0).validate(), RangeError);
  EXPECT_THROW(SurrogateSpec::straight_through(0.0).validate(), RangeError);
  EXPECT_THROW(SurrogateSpec::custom(nullptr, nullptr).validate(), ContractError);
  EXPECT_EQ(parse_surrogate("arctan").kind, SurrogateKind::arctan);
  EXPECT_EQ(parse_surrogate("straight_through").kind, SurrogateKind::straight_through);
  EXPECT_EQ(parse_surrogate("fast_sigmoid").kind, SurrogateKind::fast_sigmoid);
  EXPECT_THROW(parse_surrogate("relu"), UsageError);
}

TEST(SteSpike, ForwardIsExactlyHeaviside) {
  const SurrogateSpec s = SurrogateSpec::fast_sigmoid();
  EXPECT_EQ(ste_spike(s, Tensor::scalar(0.3)).item(), 1.0);
  EXPECT_EQ(ste_spike(s, Tensor::scalar(-0.3)).item(), 0.0);
  EXPECT_EQ(ste_spike(s, Tensor::scalar(0.0)).item(), 0.0);
  EXPECT_EQ(ste_spike(s, Tensor::scalar(0.0), /*inclusive=*/true).item(), 1.0);
}

TEST(SteSpike, GradientAtZeroIsHalfSlope) {
  Tensor x = Tensor::scalar(0.0);
  Tape tape;
  tape.watch(x);
  const Tensor y = sum(ste_spike(SurrogateSpec::fast_sigmoid(25.0), x));
  EXPECT_DOUBLE_EQ(backward(tape, y)[x].item(), 12.5);
}

TEST(SteSpike, BackwardEqualsSmoothGradientOnRandomPoints) {
  std::mt19937_64 gen(41);
  for (const auto& s : builtins()) {
    Tensor x = testing::uniform_tensor(gen, {1000}, -2, 2);
    Tape tape;
    tape.watch(x);
    const Tensor spikes = ste_spike(s, x);
    const Gradients g = backward(tape, sum(spikes));
    const Tensor expected = smooth_gradient(s, x);
    for (std::size_t i = 0; i < 1000; ++i) {
      EXPECT_NEAR(g[x][i], expected[i], 1e-12) << s.name();
      EXPECT_TRUE(spikes[i] == 0.0 || spikes[i] == 1.0);
    }
  }
}

TEST(SteSpike, CustomSurrogate) {
  const SurrogateSpec s = SurrogateSpec::custom(
      [](double x) { return 0.5 + 0.5 * std::tanh(x); },
      [](double x) { return 0.5 / (std::cosh(x) * std::cosh(x)); });
  Tensor x({3}, {-0.4, 0.0, 0.9});
  Tape tape;
  tape.watch(x);
  const Tensor y = ste_spike(s, x);
  EXPECT_EQ(testing::values(y), (std::vector<double>{0, 0, 1}));
  const Gradients g = backward(tape, sum(y));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(g[x][i], 0.5 / std::pow(std::cosh(x[i]), 2), 1e-15);
  }
}

}  // namespace
}  // namespace spikekit
