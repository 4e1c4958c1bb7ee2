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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spikekit/data.hpp"
#include "spikekit/encode.hpp"
#include "spikekit/neurons.hpp"
#include "spikekit/rng.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

/// Two fully connected layers, each followed by a spiking neuron layer:
/// inputs -> hidden (spiking) -> outputs (non-resetting readout).
class SpikingMLP {
 public:
  /// Weights are drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)],
  /// biases start at zero. The output neuron must use Reset::none.
  SpikingMLP(std::size_t inputs, std::size_t hidden, std::size_t outputs,
             SpikingNeuron hidden_neuron, SpikingNeuron output_neuron, std::size_t num_steps,
             Rng& rng);

  std::size_t inputs() const { return w1.dim(0); }
  std::size_t hidden() const { return w1.dim(1); }
  std::size_t outputs() const { return w2.dim(1); }
  std::size_t num_steps() const noexcept { return num_steps_; }

  const SpikingNeuron& hidden_neuron() const noexcept { return hidden_neuron_; }
  const SpikingNeuron& output_neuron() const noexcept { return output_neuron_; }

  /// Trainable tensors: w1, b1, w2, b2, then the raw decays of layers with
  /// learnable beta.
  std::vector<Tensor*> parameters();

  Tensor w1, b1, w2, b2;

 private:
  SpikingNeuron hidden_neuron_;
  SpikingNeuron output_neuron_;
  std::size_t num_steps_;
};

struct ForwardResult {
  Tensor spk_rec;    // [T, B, outputs]
  Tensor mem_final;  // [B, outputs]
};

/// Unrolls the network over the input's T steps, starting from fresh
/// states. Throws ContractError when T differs from model.num_steps().
ForwardResult bptt_forward(const SpikingMLP& model, const SpikeTrain& spikes_in);

/// Mean softmax cross-entropy of the final readout membrane.
Tensor membrane_loss(const Tensor& mem_final, std::span<const std::size_t> targets);
/// Mean softmax cross-entropy of per-class spike counts.
Tensor rate_count_loss(const Tensor& spk_rec, std::span<const std::size_t> targets);
/// Mean squared error between spike counts and correct_rate * T (true class)
/// or incorrect_rate * T (other classes).
Tensor mse_count_loss(const Tensor& spk_rec, std::span<const std::size_t> targets,
                      double correct_rate = 0.8, double incorrect_rate = 0.2);

enum class LossKind { membrane, rate_count, mse_count };
LossKind parse_loss(std::string_view name);
std::string loss_name(LossKind kind);

struct LossOptions {
  LossKind kind = LossKind::membrane;
  double correct_rate = 0.8;
  double incorrect_rate = 0.2;
};

Tensor compute_loss(const LossOptions& opts, const ForwardResult& fwd,
                    std::span<const std::size_t> targets);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// One bias-corrected Adam update. Parameters are replaced by new tensors.
void adam_step(AdamState& state, std::span<Tensor* const> params, std::span<const Tensor> grads);

struct TrainOptions {
  std::size_t batch_size = 128;
  LossOptions loss;
};

struct EpochMetrics {
  double train_loss = 0.0;  // sample-weighted mean over the epoch
  double seconds = 0.0;
  std::size_t batches = 0;
  std::vector<double> batch_losses;
};

/// One shuffled pass with fresh rate encoding per batch and an Adam step
/// per batch.
EpochMetrics train_epoch(SpikingMLP& model, AdamState& adam, const TrainOptions& opts,
                         const Dataset& data, Rng& rng);

/// Classification accuracy from a [B, classes] readout (argmax, ties to
/// the lowest class).
double accuracy_from_logits(const Tensor& logits, std::span<const std::size_t> labels);

/// Accuracy of the argmax of the final membrane, with inputs rate-encoded
/// from a generator seeded by `eval_seed`.
double evaluate(const SpikingMLP& model, const Dataset& data, std::uint64_t eval_seed,
                std::size_t batch_size = 1000);

}  // namespace spikekit
