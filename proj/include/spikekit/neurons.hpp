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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spikekit/surrogate.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

enum class NeuronModel { lif, integrate_and_fire, izhikevich, alif, synaptic, alpha };

/// What happens to the membrane on the step after a spike.
enum class Reset {
  subtract,  // U -= V_thr
  zero,      // U is cleared before decay
  none,      // no reset (accumulating readout layers)
};

struct IzhikevichParams {
  double a = 0.02;
  double b = 0.2;
  double c = -65.0;
  double d = 8.0;

  static IzhikevichParams regular_spiking() { return {0.02, 0.2, -65.0, 8.0}; }
  static IzhikevichParams intrinsically_bursting() { return {0.02, 0.2, -55.0, 4.0}; }
  static IzhikevichParams chattering() { return {0.02, 0.2, -50.0, 2.0}; }
  static IzhikevichParams fast_spiking() { return {0.1, 0.2, -65.0, 2.0}; }
};

/// Preset by short name: "rs", "ib", "ch" or "fs".
IzhikevichParams izhikevich_preset(std::string_view name);

struct NeuronConfig {
  double beta = 0.9;       // membrane decay, (0, 1]
  double threshold = 1.0;  // V_thr
  Reset reset = Reset::subtract;
  SurrogateSpec surrogate;
  bool learnable_beta = false;
  // Reset terms use the spike values without their gradient.
  bool detach_reset = false;

  double alpha = 0.9;    // synaptic / alpha current decay, (0, 1)
  double rho = 0.95;     // ALIF adaptation decay, (0, 1)
  double b_adapt = 0.5;  // ALIF threshold increase per unit adaptation

  IzhikevichParams izhikevich;
  double dt = 1.0;  // Euler step, ms

  // Gradient-checking mode: spikes are sigma~(x) itself instead of the
  // exact step, making the whole network smooth.
  bool smooth_spikes = false;

  /// Throws RangeError for parameters outside their domains. Only the
  /// parameters the model uses are checked.
  void validate(NeuronModel model) const;
};

/// Per-layer state, passed explicitly from step to step. `mem` is U (or v
/// for Izhikevich) and `spk` the most recent output spikes. Model-specific
/// variables are present only for the models that use them.
struct NeuronState {
  Tensor mem;
  Tensor spk;
  std::optional<Tensor> recovery;  // u, Izhikevich
  std::optional<Tensor> adapt;     // A, ALIF
  std::optional<Tensor> syn;       // I_syn, Synaptic
  std::optional<Tensor> exc;       // I_exc, Alpha
  std::optional<Tensor> inh;       // I_inh, Alpha

  /// Lookup by key: mem, spk, v, u, adapt, syn, exc, inh.
  const Tensor& get(std::string_view key) const;
};

struct StepResult {
  Tensor spk;
  NeuronState state;
};

/// State-variable names in report order (mem; v,u; mem,adapt; ...).
std::vector<std::string> state_keys(NeuronModel model);
std::string model_name(NeuronModel model);
/// "lif", "if", "izhikevich", "alif", "synaptic" or "alpha".
NeuronModel parse_model(std::string_view name);

NeuronState init_state(NeuronModel model, const NeuronConfig& cfg, std::size_t batch,
                       std::size_t features);

/// Spike nonlinearity shared by all models.
Tensor fire(const NeuronConfig& cfg, const Tensor& mem_minus_threshold, bool inclusive = false);

// Single discrete-time updates. Resets use the previous step's spikes held
// in `st.spk` (Izhikevich resets within the same step). The overloads
// without `beta` use cfg.beta.
StepResult lif_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st);
StepResult lif_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st,
                    const Tensor& beta);
StepResult if_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st);
StepResult izhikevich_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st);
StepResult alif_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st);
StepResult alif_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st,
                     const Tensor& beta);
StepResult synaptic_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st);
StepResult synaptic_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st,
                         const Tensor& beta);
StepResult alpha_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st);
StepResult alpha_step(const NeuronConfig& cfg, const Tensor& x, const NeuronState& st,
                      const Tensor& beta);

/// logistic(raw), keeping a learnable decay inside (0, 1).
Tensor learnable_beta_value(const Tensor& raw);

/// A neuron layer: model, config and (optionally) the unconstrained decay
/// parameter, one per layer.
class SpikingNeuron {
 public:
  SpikingNeuron(NeuronModel model, NeuronConfig cfg);

  NeuronModel model() const noexcept { return model_; }
  const NeuronConfig& config() const noexcept { return cfg_; }

  NeuronState init_state(std::size_t batch, std::size_t features) const;
  StepResult step(const Tensor& x, const NeuronState& st) const;

  /// Effective decay as a scalar tensor.
  Tensor beta() const;
  /// Raw decay parameter (meaningful when learnable_beta is set).
  Tensor& beta_raw() noexcept { return beta_raw_; }
  const Tensor& beta_raw() const noexcept { return beta_raw_; }

 private:
  NeuronModel model_;
  NeuronConfig cfg_;
  Tensor beta_raw_;
};

}  // namespace spikekit
