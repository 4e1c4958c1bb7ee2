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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spikekit/data.hpp"
#include "spikekit/neurons.hpp"
#include "spikekit/surrogate.hpp"
#include "spikekit/train.hpp"

namespace spikekit {

/// Hyperparameters of one MNIST run.
struct ExperimentConfig {
  std::string preset = "custom";
  double beta = 0.9;
  std::size_t hidden = 128;
  double lr = 1e-3;
  std::size_t batch = 128;
  std::size_t num_steps = 25;
  std::size_t epochs = 25;
  SurrogateSpec surrogate = SurrogateSpec::fast_sigmoid(25.0);
  LossOptions loss;
  NeuronModel hidden_model = NeuronModel::lif;
  // Hidden-layer reset terms carry no gradient.
  bool detach_reset = true;
  std::uint64_t seed = 42;
  std::uint64_t eval_seed = 20240601;
  std::string data_dir;

  void validate() const;
  /// (key, value) pairs using the config-file key names.
  std::vector<std::pair<std::string, std::string>> fields() const;
};

/// The five reference configurations "C1" .. "C5".
ExperimentConfig preset_config(std::string_view name);

/// Sets one key (beta, hidden, lr, batch, steps, epochs, surrogate, k,
/// alpha, slope, loss, correct-rate, incorrect-rate, model, detach-reset,
/// seed, eval-seed, data-dir, preset). Throws UsageError naming the key on bad
/// input.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// `key = value` lines; '#' starts a comment. Keys as for apply_setting.
/// Parses `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path);

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

SpikingMLP build_model(const ExperimentConfig& cfg, std::size_t inputs, std::size_t outputs,
                       Rng& rng);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double test_acc = 0.0;
  double seconds = 0.0;
  std::vector<double> batch_losses;
};

struct ExperimentResult {
  std::vector<EpochRecord> epochs;
  double untrained_acc = 0.0;  // only measured when cfg.epochs == 0
  double best_acc = 0.0;
  double total_seconds = 0.0;
};

/// Builds the model from cfg.seed, trains for cfg.epochs and evaluates on
/// `test` after every epoch. `on_epoch` sees each record as it completes.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& train,
                                const Dataset& test,
                                const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace spikekit
