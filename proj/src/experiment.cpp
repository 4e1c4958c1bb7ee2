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

#include "spikekit/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <string>

#include "spikekit/error.hpp"

namespace spikekit {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(beta > 0 && beta <= 1)) throw UsageError("beta must lie in (0, 1]");
  if (hidden == 0) throw UsageError("hidden must be >= 1");
  if (!(lr > 0)) throw UsageError("lr must be > 0");
  if (batch == 0) throw UsageError("batch must be >= 1");
  if (num_steps == 0) throw UsageError("steps must be >= 1");
  if (!(loss.correct_rate >= 0 && loss.correct_rate <= 1)) {
    throw UsageError("correct-rate must lie in [0, 1]");
  }
  if (!(loss.incorrect_rate >= 0 && loss.incorrect_rate <= 1)) {
    throw UsageError("incorrect-rate must lie in [0, 1]");
  }
  try {
    surrogate.validate();
  } catch (const std::exception& e) {
    throw UsageError(std::string("surrogate: ") + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::fields() const {
  return {
      {"preset", preset},
      {"beta", format_double(beta)},
      {"hidden", std::to_string(hidden)},
      {"lr", format_double(lr)},
      {"batch", std::to_string(batch)},
      {"steps", std::to_string(num_steps)},
      {"epochs", std::to_string(epochs)},
      {"surrogate", surrogate.name()},
      {"k", format_double(surrogate.k)},
      {"alpha", format_double(surrogate.alpha)},
      {"slope", format_double(surrogate.s)},
      {"loss", loss_name(loss.kind)},
      {"correct-rate", format_double(loss.correct_rate)},
      {"incorrect-rate", format_double(loss.incorrect_rate)},
      {"model", model_name(hidden_model)},
      {"detach-reset", detach_reset ? "true" : "false"},
      {"seed", std::to_string(seed)},
      {"eval-seed", std::to_string(eval_seed)},
  };
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig cfg;
  cfg.preset = std::string(name);
  if (name == "C1") {
    cfg.beta = 0.85;
    cfg.hidden = 256;
  } else if (name == "C2") {
    cfg.beta = 0.9;
    cfg.hidden = 256;
  } else if (name == "C3") {
    cfg.beta = 0.9;
    cfg.hidden = 256;
    cfg.batch = 256;
  } else if (name == "C4") {
    cfg.beta = 0.9;
    cfg.hidden = 128;
  } else if (name == "C5") {
    cfg.beta = 0.95;
    cfg.hidden = 128;
    cfg.lr = 2e-3;
    cfg.epochs = 15;
  } else {
    throw UsageError("unknown preset '" + std::string(name) + "' (expected C1 .. C5)");
  }
  return cfg;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  if (key == "preset") {
    const auto keep_dir = cfg.data_dir;
    cfg = preset_config(v);
    cfg.data_dir = keep_dir;
  } else if (key == "beta") {
    cfg.beta = parse_double(key, v);
  } else if (key == "hidden") {
    cfg.hidden = parse_uint(key, v);
  } else if (key == "lr") {
    cfg.lr = parse_double(key, v);
  } else if (key == "batch") {
    cfg.batch = parse_uint(key, v);
  } else if (key == "steps") {
    cfg.num_steps = parse_uint(key, v);
  } else if (key == "epochs") {
    cfg.epochs = parse_uint(key, v);
  } else if (key == "surrogate") {
    const SurrogateSpec parsed = parse_surrogate(v);
    cfg.surrogate.kind = parsed.kind;
  } else if (key == "k") {
    cfg.surrogate.k = parse_double(key, v);
  } else if (key == "alpha") {
    cfg.surrogate.alpha = parse_double(key, v);
  } else if (key == "slope") {
    cfg.surrogate.s = parse_double(key, v);
  } else if (key == "loss") {
    cfg.loss.kind = parse_loss(v);
  } else if (key == "correct-rate") {
    cfg.loss.correct_rate = parse_double(key, v);
  } else if (key == "incorrect-rate") {
    cfg.loss.incorrect_rate = parse_double(key, v);
  } else if (key == "model") {
    cfg.hidden_model = parse_model(v);
  } else if (key == "detach-reset") {
    if (v != "true" && v != "false") {
      throw UsageError("detach-reset: expected true or false, got '" + v + "'");
    }
    cfg.detach_reset = v == "true";
  } else if (key == "seed") {
    cfg.seed = parse_uint(key, v);
  } else if (key == "eval-seed") {
    cfg.eval_seed = parse_uint(key, v);
  } else if (key == "data-dir") {
    cfg.data_dir = v;
  } else {
    throw UsageError("unknown setting '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot read config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out.emplace_back(trim(std::string_view(line).substr(0, eq)),
                     trim(std::string_view(line).substr(eq + 1)));
  }
  return out;
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  for (const auto& [key, value] : read_config_file(path)) apply_setting(cfg, key, value);
}

SpikingMLP build_model(const ExperimentConfig& cfg, std::size_t inputs, std::size_t outputs,
                       Rng& rng) {
  NeuronConfig hidden_cfg;
  hidden_cfg.beta = cfg.beta;
  hidden_cfg.surrogate = cfg.surrogate;
  hidden_cfg.detach_reset = cfg.detach_reset;
  NeuronConfig out_cfg = hidden_cfg;
  out_cfg.reset = Reset::none;
  return SpikingMLP(inputs, cfg.hidden, outputs, SpikingNeuron(cfg.hidden_model, hidden_cfg),
                    SpikingNeuron(NeuronModel::lif, out_cfg), cfg.num_steps, rng);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& train,
                                const Dataset& test,
                                const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Rng init_rng(derive_seed(cfg.seed, 0));
  Rng train_rng(derive_seed(cfg.seed, 1));
  SpikingMLP model = build_model(cfg, train.features(), 10, init_rng);
  AdamState adam;
  adam.lr = cfg.lr;
  TrainOptions opts;
  opts.batch_size = cfg.batch;
  opts.loss = cfg.loss;

  ExperimentResult result;
  if (cfg.epochs == 0) {
    result.untrained_acc = evaluate(model, test, cfg.eval_seed);
    result.best_acc = result.untrained_acc;
  }
  for (std::size_t e = 1; e <= cfg.epochs; ++e) {
    const EpochMetrics m = train_epoch(model, adam, opts, train, train_rng);
    EpochRecord rec;
    rec.epoch = e;
    rec.train_loss = m.train_loss;
    rec.test_acc = evaluate(model, test, cfg.eval_seed);
    rec.seconds = m.seconds;
    rec.batch_losses = m.batch_losses;
    result.best_acc = e == 1 ? rec.test_acc : std::max(result.best_acc, rec.test_acc);
    result.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace spikekit
