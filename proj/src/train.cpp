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

#include "spikekit/train.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "spikekit/error.hpp"
#include "spikekit/ops.hpp"
#include "spikekit/tape.hpp"

namespace spikekit {
namespace {

Tensor uniform_init(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  return rng_uniform(rng, {fan_in, fan_out}, -bound, bound);
}

void check_targets(std::span<const std::size_t> targets, std::size_t batch, std::size_t classes) {
  if (targets.size() != batch) {
    throw DimensionError("got " + std::to_string(targets.size()) + " targets for a batch of " +
                         std::to_string(batch));
  }
  for (auto t : targets) {
    if (t >= classes) {
      throw RangeError("target " + std::to_string(t) + " outside 0.." +
                       std::to_string(classes - 1));
    }
  }
}

}  // namespace

SpikingMLP::SpikingMLP(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                       SpikingNeuron hidden_neuron, SpikingNeuron output_neuron,
                       std::size_t num_steps, Rng& rng)
    : hidden_neuron_(std::move(hidden_neuron)),
      output_neuron_(std::move(output_neuron)),
      num_steps_(num_steps) {
  if (inputs == 0 || hidden == 0 || outputs == 0 || num_steps == 0) {
    throw DimensionError("SpikingMLP needs positive layer sizes and step count");
  }
  if (output_neuron_.model() != NeuronModel::izhikevich &&
      output_neuron_.config().reset != Reset::none) {
    throw ContractError("the readout layer must not reset (Reset::none)");
  }
  w1 = uniform_init(rng, inputs, hidden);
  b1 = Tensor::zeros({hidden});
  w2 = uniform_init(rng, hidden, outputs);
  b2 = Tensor::zeros({outputs});
}

std::vector<Tensor*> SpikingMLP::parameters() {
  std::vector<Tensor*> params{&w1, &b1, &w2, &b2};
  if (hidden_neuron_.config().learnable_beta) params.push_back(&hidden_neuron_.beta_raw());
  if (output_neuron_.config().learnable_beta) params.push_back(&output_neuron_.beta_raw());
  return params;
}

ForwardResult bptt_forward(const SpikingMLP& model, const SpikeTrain& spikes_in) {
  if (spikes_in.num_steps != model.num_steps()) {
    throw ContractError("input has " + std::to_string(spikes_in.num_steps) +
                        " steps, model expects " + std::to_string(model.num_steps()));
  }
  const Tensor& raster = spikes_in.data;
  if (raster.rank() != 3 || raster.dim(2) != model.inputs()) {
    throw DimensionError("bptt_forward expects [T, B, " + std::to_string(model.inputs()) +
                         "], got " + shape_string(raster.shape()));
  }
  const std::size_t batch = raster.dim(1);
  NeuronState hidden = model.hidden_neuron().init_state(batch, model.hidden());
  NeuronState out = model.output_neuron().init_state(batch, model.outputs());
  std::vector<Tensor> recorded;
  recorded.reserve(model.num_steps());
  for (std::size_t t = 0; t < model.num_steps(); ++t) {
    const Tensor current = matmul(index(raster, t), model.w1) + model.b1;
    auto h = model.hidden_neuron().step(current, hidden);
    const Tensor readout = matmul(h.spk, model.w2) + model.b2;
    auto o = model.output_neuron().step(readout, out);
    hidden = std::move(h.state);
    out = std::move(o.state);
    recorded.push_back(std::move(o.spk));
  }
  return {stack(recorded), out.mem};
}

Tensor membrane_loss(const Tensor& mem_final, std::span<const std::size_t> targets) {
  if (mem_final.rank() != 2) {
    throw DimensionError("membrane_loss expects [B, classes], got " +
                         shape_string(mem_final.shape()));
  }
  check_targets(targets, mem_final.dim(0), mem_final.dim(1));
  return neg(mean(pick(log_softmax(mem_final), targets)));
}

Tensor rate_count_loss(const Tensor& spk_rec, std::span<const std::size_t> targets) {
  return membrane_loss(sum(spk_rec, 0), targets);
}

Tensor mse_count_loss(const Tensor& spk_rec, std::span<const std::size_t> targets,
                      double correct_rate, double incorrect_rate) {
  if (!(correct_rate >= 0 && correct_rate <= 1 && incorrect_rate >= 0 && incorrect_rate <= 1)) {
    throw RangeError("mse_count_loss rates must lie in [0, 1]");
  }
  if (spk_rec.rank() != 3) {
    throw DimensionError("mse_count_loss expects [T, B, classes], got " +
                         shape_string(spk_rec.shape()));
  }
  const std::size_t steps = spk_rec.dim(0), batch = spk_rec.dim(1), classes = spk_rec.dim(2);
  check_targets(targets, batch, classes);
  const double on = correct_rate * static_cast<double>(steps);
  const double off = incorrect_rate * static_cast<double>(steps);
  std::vector<double> wanted(batch * classes, off);
  for (std::size_t b = 0; b < batch; ++b) wanted[b * classes + targets[b]] = on;
  const Tensor counts = sum(spk_rec, 0);
  return mean(square(counts - Tensor({batch, classes}, std::move(wanted))));
}

LossKind parse_loss(std::string_view name) {
  if (name == "membrane") return LossKind::membrane;
  if (name == "rate_count") return LossKind::rate_count;
  if (name == "mse_count") return LossKind::mse_count;
  throw UsageError("unknown loss '" + std::string(name) +
                   "' (expected membrane, rate_count or mse_count)");
}

std::string loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::membrane: return "membrane";
    case LossKind::rate_count: return "rate_count";
    case LossKind::mse_count: return "mse_count";
  }
  return "unknown";
}

Tensor compute_loss(const LossOptions& opts, const ForwardResult& fwd,
                    std::span<const std::size_t> targets) {
  switch (opts.kind) {
    case LossKind::membrane: return membrane_loss(fwd.mem_final, targets);
    case LossKind::rate_count: return rate_count_loss(fwd.spk_rec, targets);
    case LossKind::mse_count:
      return mse_count_loss(fwd.spk_rec, targets, opts.correct_rate, opts.incorrect_rate);
  }
  throw ContractError("unhandled loss kind");
}

void adam_step(AdamState& state, std::span<Tensor* const> params, std::span<const Tensor> grads) {
  if (params.size() != grads.size()) {
    throw ContractError("adam_step got " + std::to_string(params.size()) + " parameters and " +
                        std::to_string(grads.size()) + " gradients");
  }
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.emplace_back(p->size(), 0.0);
      state.v.emplace_back(p->size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw ContractError("adam_step parameter count changed between steps");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].shape() != params[i]->shape() || state.m[i].size() != params[i]->size()) {
      throw ContractError("adam_step shape mismatch for parameter " + std::to_string(i) + ": " +
                          shape_string(params[i]->shape()) + " vs gradient " +
                          shape_string(grads[i].shape()));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto p = params[i]->data();
    const auto g = grads[i].data();
    std::vector<double> next(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      next[j] = p[j] - state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
    *params[i] = Tensor(params[i]->shape(), std::move(next));
  }
}

EpochMetrics train_epoch(SpikingMLP& model, AdamState& adam, const TrainOptions& opts,
                         const Dataset& data, Rng& rng) {
  if (data.size() == 0) throw ContractError("train_epoch on an empty dataset");
  const auto start = std::chrono::steady_clock::now();
  const auto plan = batches(data, opts.batch_size, &rng, /*shuffle=*/true);
  EpochMetrics metrics;
  double weighted = 0.0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const Batch batch = plan[i];
    const SpikeTrain spikes = rate_encode(batch.images, model.num_steps(), rng);
    const auto params = model.parameters();
    std::vector<Tensor> grads;
    {
      Tape tape;
      for (Tensor* p : params) tape.watch(*p);
      const ForwardResult fwd = bptt_forward(model, spikes);
      const Tensor loss = compute_loss(opts.loss, fwd, batch.labels);
      const Gradients g = backward(tape, loss);
      for (const Tensor* p : params) grads.push_back(g[*p]);
      weighted += loss.item() * static_cast<double>(batch.labels.size());
      metrics.batch_losses.push_back(loss.item());
    }
    adam_step(adam, params, grads);
    ++metrics.batches;
  }
  metrics.train_loss = weighted / static_cast<double>(data.size());
  metrics.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return metrics;
}

namespace {

std::size_t count_hits(const Tensor& logits, std::span<const std::size_t> labels) {
  const Tensor predicted = argmax_lastaxis(logits);
  if (predicted.size() != labels.size()) {
    throw DimensionError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(labels.size()) + " labels");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (static_cast<std::size_t>(predicted[i]) == labels[i]) ++hits;
  }
  return hits;
}

}  // namespace

double accuracy_from_logits(const Tensor& logits, std::span<const std::size_t> labels) {
  const std::size_t hits = count_hits(logits, labels);
  return labels.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(labels.size());
}

double evaluate(const SpikingMLP& model, const Dataset& data, std::uint64_t eval_seed,
                std::size_t batch_size) {
  if (data.size() == 0) return 0.0;
  Rng rng(eval_seed);
  const auto plan = batches(data, batch_size, nullptr, /*shuffle=*/false);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const Batch batch = plan[i];
    const auto fwd = bptt_forward(model, rate_encode(batch.images, model.num_steps(), rng));
    hits += count_hits(fwd.mem_final, batch.labels);
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace spikekit
