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


#include "bptt_check.hpp"

#include <cmath>
#include <random>

#include "oracle/oracle.hpp"
#include "spikekit/ops.hpp"
#include "spikekit/tape.hpp"
#include "spikekit/train.hpp"
#include "support.hpp"

namespace spikekit::testing {
namespace {

oracle::Neuron reference_neuron(const SpikingNeuron& n) {
  const NeuronConfig& c = n.config();
  oracle::Neuron o;
  switch (n.model()) {
    case NeuronModel::lif: o.model = oracle::Model::lif; break;
    case NeuronModel::integrate_and_fire: o.model = oracle::Model::integrate_and_fire; break;
    case NeuronModel::izhikevich: o.model = oracle::Model::izhikevich; break;
    case NeuronModel::alif: o.model = oracle::Model::alif; break;
    case NeuronModel::synaptic: o.model = oracle::Model::synaptic; break;
    case NeuronModel::alpha: o.model = oracle::Model::alpha; break;
  }
  o.reset = c.reset == Reset::zero   ? oracle::Reset::zero
            : c.reset == Reset::none ? oracle::Reset::none
                                     : oracle::Reset::subtract;
  o.beta = c.beta;
  o.threshold = c.threshold;
  o.alpha = c.alpha;
  o.rho = c.rho;
  o.b_adapt = c.b_adapt;
  o.izh = {c.izhikevich.a, c.izhikevich.b, c.izhikevich.c, c.izhikevich.d};
  o.dt = c.dt;
  o.surrogate.kind = c.surrogate.kind == SurrogateKind::arctan ? oracle::Surrogate::arctan
                     : c.surrogate.kind == SurrogateKind::straight_through
                         ? oracle::Surrogate::straight_through
                         : oracle::Surrogate::fast_sigmoid;
  o.surrogate.k = c.surrogate.k;
  o.surrogate.alpha = c.surrogate.alpha;
  o.surrogate.s = c.surrogate.s;
  o.smooth = true;
  o.detach_reset = c.detach_reset;
  return o;
}

double reference_loss(const SpikingMLP& model, const std::vector<double>& theta,
                      const Tensor& raster, const std::vector<std::size_t>& targets,
                      const LossOptions& loss, const oracle::NetResult* frozen,
                      oracle::NetResult* record = nullptr) {
  oracle::Net net;
  net.inputs = model.inputs();
  net.hidden = model.hidden();
  net.outputs = model.outputs();
  std::size_t at = 0;
  auto take = [&](std::size_t n) {
    std::vector<double> v(theta.begin() + at, theta.begin() + at + n);
    at += n;
    return v;
  };
  net.w1 = take(net.inputs * net.hidden);
  net.b1 = take(net.hidden);
  net.w2 = take(net.hidden * net.outputs);
  net.b2 = take(net.outputs);
  oracle::Neuron hid = reference_neuron(model.hidden_neuron());
  oracle::Neuron out = reference_neuron(model.output_neuron());
  if (model.hidden_neuron().config().learnable_beta) hid.beta = oracle::logistic(theta[at++]);
  if (model.output_neuron().config().learnable_beta) out.beta = oracle::logistic(theta[at++]);

  const std::size_t T = raster.dim(0), B = raster.dim(1);
  std::vector<std::vector<double>> x(T);
  for (std::size_t t = 0; t < T; ++t) {
    x[t].assign(raster.raw() + t * B * net.inputs, raster.raw() + (t + 1) * B * net.inputs);
  }
  const oracle::NetResult r = oracle::run_net(net, hid, out, x, B, frozen);
  if (record) *record = r;
  if (loss.kind == LossKind::membrane) return oracle::cross_entropy(r.mem_final, net.outputs, targets);
  std::vector<double> counts(B * net.outputs, 0.0);
  for (const auto& s : r.out_spikes) {
    for (std::size_t q = 0; q < counts.size(); ++q) counts[q] += s[q];
  }
  if (loss.kind == LossKind::rate_count) return oracle::cross_entropy(counts, net.outputs, targets);
  double total = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < net.outputs; ++c) {
      const double rate = c == targets[b] ? loss.correct_rate : loss.incorrect_rate;
      const double d = counts[b * net.outputs + c] - rate * static_cast<double>(T);
      total += d * d;
    }
  }
  return total / static_cast<double>(B * net.outputs);
}

}  // namespace

BpttCheck check_bptt_gradient(SpikingMLP model, std::uint64_t seed, const LossOptions& loss,
                              double weight_scale, double bias_offset) {
  std::mt19937_64 gen(seed);
  const std::size_t T = model.num_steps(), B = 2;
  model.w1 = scale(uniform_tensor(gen, model.w1.shape(), -1, 1), weight_scale);
  model.b1 = uniform_tensor(gen, model.b1.shape(), -0.5, 0.5) + bias_offset;
  model.w2 = scale(uniform_tensor(gen, model.w2.shape(), -1, 1), weight_scale);
  model.b2 = uniform_tensor(gen, model.b2.shape(), -0.5, 0.5) + bias_offset;
  std::uniform_real_distribution<double> raw(-1.0, 2.0);
  for (std::size_t i = 4; i < model.parameters().size(); ++i) {
    *model.parameters()[i] = Tensor::scalar(raw(gen));
  }
  const Tensor raster = uniform_tensor(gen, {T, B, model.inputs()}, 0, 1);
  std::uniform_int_distribution<std::size_t> cls(0, model.outputs() - 1);
  const std::vector<std::size_t> targets = {cls(gen), cls(gen)};

  std::vector<double> theta;
  std::vector<double> ad;
  double library_loss = 0.0;
  {
    const auto params = model.parameters();
    Tape tape;
    for (Tensor* p : params) {
      tape.watch(*p);
      const auto v = values(*p);
      theta.insert(theta.end(), v.begin(), v.end());
    }
    const ForwardResult fwd = bptt_forward(model, SpikeTrain{raster, T});
    const Tensor l = compute_loss(loss, fwd, targets);
    library_loss = l.item();
    const Gradients g = backward(tape, l);
    for (const Tensor* p : params) {
      const auto v = values(g[*p]);
      ad.insert(ad.end(), v.begin(), v.end());
    }
  }
  // Detached reset spikes are held at their values from the unperturbed run.
  oracle::NetResult base;
  const double base_loss = reference_loss(model, theta, raster, targets, loss, nullptr, &base);
  const auto f = [&](const std::vector<double>& th) {
    return reference_loss(model, th, raster, targets, loss, &base);
  };
  BpttCheck out;
  out.loss_library = library_loss;
  out.loss_reference = base_loss;
  out.relative_error = oracle::relative_error(ad, oracle::central_differences(f, theta, 1e-5));
  double norm = 0.0;
  for (double g : ad) norm += g * g;
  out.gradient_norm = std::sqrt(norm);
  return out;
}

SpikingMLP toy_network(NeuronModel model, const SurrogateSpec& surrogate, Reset reset,
                       bool learnable_beta, bool detach_reset) {
  NeuronConfig hid;
  hid.beta = 0.85;
  hid.alpha = 0.7;
  hid.rho = 0.9;
  hid.b_adapt = 0.4;
  hid.surrogate = surrogate;
  hid.reset = reset;
  hid.smooth_spikes = true;
  hid.learnable_beta = learnable_beta;
  hid.detach_reset = detach_reset;
  NeuronConfig out = hid;
  out.reset = Reset::none;
  Rng rng(1);
  return SpikingMLP(4, 2, 3, SpikingNeuron(model, hid), SpikingNeuron(model, out), 3, rng);
}

BpttCheck check_toy_network(NeuronModel model, const SurrogateSpec& surrogate, Reset reset,
                            bool learnable_beta, std::uint64_t seed, const LossOptions& loss,
                            bool detach_reset) {
  const bool izh = model == NeuronModel::izhikevich;
  return check_bptt_gradient(toy_network(model, surrogate, reset, learnable_beta, detach_reset),
                             seed, loss,
                             izh ? 10.0 : 1.0, izh ? 5.0 : 0.0);
}

}  // namespace spikekit::testing
