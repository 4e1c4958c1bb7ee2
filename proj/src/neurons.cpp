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

#include "spikekit/neurons.hpp"

#include <cmath>
#include <string>

#include "spikekit/error.hpp"
#include "spikekit/ops.hpp"

namespace spikekit {
namespace {

void require_same_shape(const Tensor& x, const NeuronState& st, const char* what) {
  if (x.shape() != st.mem.shape()) {
    throw DimensionError(std::string(what) + ": input shape " + shape_string(x.shape()) +
                         " does not match state shape " + shape_string(st.mem.shape()));
  }
}

Tensor reset_spikes(const NeuronConfig& cfg, const Tensor& spk) {
  return cfg.detach_reset ? stop_gradient(spk) : spk;
}

// beta * U + drive, then the configured reset using the previous spikes.
Tensor integrate(const NeuronConfig& cfg, const Tensor& beta, const Tensor& mem,
                 const Tensor& drive, const Tensor& spikes) {
  const Tensor spk_prev = reset_spikes(cfg, spikes);
  switch (cfg.reset) {
    case Reset::subtract:
      return beta * mem + drive - spk_prev * cfg.threshold;
    case Reset::zero:
      return beta * (mem * (1.0 - spk_prev)) + drive;
    case Reset::none:
      return beta * mem + drive;
  }
  return beta * mem + drive;
}

const Tensor& require(const std::optional<Tensor>& field, const char* name) {
  if (!field) throw ContractError(std::string("neuron state has no '") + name + "' entry");
  return *field;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

IzhikevichParams izhikevich_preset(std::string_view name) {
  if (name == "rs") return IzhikevichParams::regular_spiking();
  if (name == "ib") return IzhikevichParams::intrinsically_bursting();
  if (name == "ch") return IzhikevichParams::chattering();
  if (name == "fs") return IzhikevichParams::fast_spiking();
  throw UsageError("unknown Izhikevich preset '" + std::string(name) +
                   "' (expected rs, ib, ch or fs)");
}

void NeuronConfig::validate(NeuronModel model) const {
  surrogate.validate();
  if (model == NeuronModel::izhikevich) {
    if (!(dt > 0)) throw RangeError("izhikevich dt must be > 0");
    return;
  }
  if (!(threshold > 0)) throw RangeError("threshold must be > 0");
  if (model != NeuronModel::integrate_and_fire && !(beta > 0 && beta <= 1)) {
    throw RangeError("beta must lie in (0, 1], got " + std::to_string(beta));
  }
  if ((model == NeuronModel::synaptic || model == NeuronModel::alpha) &&
      !(alpha >= 0 && alpha < 1)) {
    throw RangeError("alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
  if (model == NeuronModel::alif) {
    if (!(rho > 0 && rho < 1)) throw RangeError("rho must lie in (0, 1)");
    if (!(b_adapt >= 0)) throw RangeError("b_adapt must be >= 0");
  }
}

const Tensor& NeuronState::get(std::string_view key) const {
  if (key == "mem" || key == "v") return mem;
  if (key == "spk") return spk;
  if (key == "u") return require(recovery, "u");
  if (key == "adapt") return require(adapt, "adapt");
  if (key == "syn") return require(syn, "syn");
  if (key == "exc") return require(exc, "exc");
  if (key == "inh") return require(inh, "inh");
  throw ContractError("unknown neuron state key '" + std::string(key) + "'");
}

std::vector<std::string> state_keys(NeuronModel model) {
  switch (model) {
    case NeuronModel::lif:
    case NeuronModel::integrate_and_fire: return {"mem"};
    case NeuronModel::izhikevich: return {"v", "u"};
    case NeuronModel::alif: return {"mem", "adapt"};
    case NeuronModel::synaptic: return {"mem", "syn"};
    case NeuronModel::alpha: return {"mem", "exc", "inh"};
  }
  return {};
}

std::string model_name(NeuronModel model) {
  switch (model) {
    case NeuronModel::lif: return "lif";
    case NeuronModel::integrate_and_fire: return "if";
    case NeuronModel::izhikevich: return "izhikevich";
    case NeuronModel::alif: return "alif";
    case NeuronModel::synaptic: return "synaptic";
    case NeuronModel::alpha: return "alpha";
  }
  return "unknown";
}

NeuronModel parse_model(std::string_view name) {
  if (name == "lif") return NeuronModel::lif;
  if (name == "if") return NeuronModel::integrate_and_fire;
  if (name == "izhikevich") return NeuronModel::izhikevich;
  if (name == "alif") return NeuronModel::alif;
  if (name == "synaptic") return NeuronModel::synaptic;
  if (name == "alpha") return NeuronModel::alpha;
  throw UsageError("unknown neuron model '" + std::string(name) +
                   "' (expected lif, if, izhikevich, alif, synaptic or alpha)");
}

NeuronState init_state(NeuronModel model, const NeuronConfig& cfg, std::size_t batch,
                       std::size_t features) {
  if (batch == 0 || features == 0) {
    throw DimensionError("init_state needs positive batch and feature counts, got " +
                         std::to_string(batch) + "x" + std::to_string(features));
  }
  const Shape shape{batch, features};
  NeuronState st;
  st.mem = Tensor::zeros(shape);
  st.spk = Tensor::zeros(shape);
  switch (model) {
    case NeuronModel::izhikevich:
      st.mem = Tensor::full(shape, cfg.izhikevich.c);
      st.recovery = Tensor::full(shape, cfg.izhikevich.b * cfg.izhikevich.c);
      break;
    case NeuronModel::alif: st.adapt = Tensor::zeros(shape); break;
    case NeuronModel::synaptic: st.syn = Tensor::zeros(shape); break;
    case NeuronModel::alpha:
      st.exc = Tensor::zeros(shape);
      st.inh = Tensor::zeros(shape);
      break;
    default: break;
  }
  return st;
}

Tensor fire(const NeuronConfig& cfg, const Tensor& mem_minus_threshold, bool inclusive) {
  if (cfg.smooth_spikes) return smooth_forward(cfg.surrogate, mem_minus_threshold);
  return ste_spike(cfg.surrogate, mem_minus_threshold, inclusive);
}

// ---------------------------------------------------------------------------

StepResult lif_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st) {
  return lif_step(cfg, x, st, Tensor::scalar(cfg.beta));
}

StepResult lif_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st,
                    const Tensor& beta) {
  require_same_shape(x, st, "lif_step");
  NeuronState next;
  next.mem = integrate(cfg, beta, st.mem, x, st.spk);
  next.spk = fire(cfg, next.mem - cfg.threshold);
  return {next.spk, std::move(next)};
}

StepResult if_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st) {
  return lif_step(cfg, x, st, Tensor::scalar(1.0));
}

StepResult izhikevich_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st) {
  require_same_shape(x, st, "izhikevich_step");
  const auto& p = cfg.izhikevich;
  const Tensor& v = st.mem;
  const Tensor& u = require(st.recovery, "u");
  const Tensor dv = scale(square(v), 0.04) + scale(v, 5.0) + 140.0 - u + x;
  const Tensor du = scale(scale(v, p.b) - u, p.a);
  const Tensor v_euler = v + scale(dv, cfg.dt);
  const Tensor u_euler = u + scale(du, cfg.dt);
  // Detection on the normalized distance to the 30 mV peak, inclusive.
  const Tensor spk = fire(cfg, scale(v_euler - 30.0, 1.0 / 30.0), /*inclusive=*/true);
  NeuronState next;
  const Tensor r = reset_spikes(cfg, spk);
  next.mem = v_euler * (1.0 - r) + scale(r, p.c);
  next.recovery = u_euler + scale(r, p.d);
  next.spk = spk;
  return {spk, std::move(next)};
}

StepResult alif_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st) {
  return alif_step(cfg, x, st, Tensor::scalar(cfg.beta));
}

StepResult alif_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st,
                     const Tensor& beta) {
  require_same_shape(x, st, "alif_step");
  NeuronState next;
  next.mem = integrate(cfg, beta, st.mem, x, st.spk);
  next.adapt = scale(require(st.adapt, "adapt"), cfg.rho) + st.spk;
  const Tensor v_eff = scale(*next.adapt, cfg.b_adapt) + cfg.threshold;
  next.spk = fire(cfg, next.mem - v_eff);
  return {next.spk, std::move(next)};
}

StepResult synaptic_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st) {
  return synaptic_step(cfg, x, st, Tensor::scalar(cfg.beta));
}

StepResult synaptic_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st,
                         const Tensor& beta) {
  require_same_shape(x, st, "synaptic_step");
  NeuronState next;
  next.syn = scale(require(st.syn, "syn"), cfg.alpha) + x;
  next.mem = integrate(cfg, beta, st.mem, *next.syn, st.spk);
  next.spk = fire(cfg, next.mem - cfg.threshold);
  return {next.spk, std::move(next)};
}

StepResult alpha_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st) {
  return alpha_step(cfg, x, st, Tensor::scalar(cfg.beta));
}

StepResult alpha_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st,
                      const Tensor& beta) {
  require_same_shape(x, st, "alpha_step");
  NeuronState next;
  next.exc = scale(require(st.exc, "exc"), cfg.alpha) + x;
  next.inh = scale(require(st.inh, "inh"), cfg.alpha) + *next.exc;
  next.mem = integrate(cfg, beta, st.mem, *next.inh, st.spk);
  next.spk = fire(cfg, next.mem - cfg.threshold);
  return {next.spk, std::move(next)};
}

Tensor learnable_beta_value(const Tensor& raw) { return logistic(raw); }

// ---------------------------------------------------------------------------

SpikingNeuron::SpikingNeuron(NeuronModel model, NeuronConfig cfg)
    : model_(model), cfg_(std::move(cfg)) {
  cfg_.validate(model_);
  if (cfg_.learnable_beta) {
    if (!(cfg_.beta > 0 && cfg_.beta < 1)) {
      throw RangeError("learnable beta must start strictly inside (0, 1)");
    }
    beta_raw_ = Tensor::scalar(logit(cfg_.beta));
  } else {
    beta_raw_ = Tensor::scalar(cfg_.beta);
  }
}

NeuronState SpikingNeuron::init_state(std::size_t batch, std::size_t features) const {
  return spikekit::init_state(model_, cfg_, batch, features);
}

Tensor SpikingNeuron::beta() const {
  if (model_ == NeuronModel::integrate_and_fire) return Tensor::scalar(1.0);
  if (cfg_.learnable_beta) return learnable_beta_value(beta_raw_);
  return Tensor::scalar(cfg_.beta);
}

StepResult SpikingNeuron::step(const Tensor& x, const NeuronState& st) const {
  switch (model_) {
    case NeuronModel::lif: return lif_step(cfg_, x, st, beta());
    case NeuronModel::integrate_and_fire: return lif_step(cfg_, x, st, Tensor::scalar(1.0));
    case NeuronModel::izhikevich: return izhikevich_step(cfg_, x, st);
    case NeuronModel::alif: return alif_step(cfg_, x, st, beta());
    case NeuronModel::synaptic: return synaptic_step(cfg_, x, st, beta());
    case NeuronModel::alpha: return alpha_step(cfg_, x, st, beta());
  }
  throw ContractError("unhandled neuron model");
}

}  // namespace spikekit
