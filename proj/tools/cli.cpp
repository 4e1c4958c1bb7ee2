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


#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "spikekit/data.hpp"
#include "spikekit/encode.hpp"
#include "spikekit/error.hpp"
#include "spikekit/experiment.hpp"
#include "spikekit/neurons.hpp"
#include "spikekit/ops.hpp"
#include "spikekit/rng.hpp"
#include "spikekit/surrogate.hpp"

namespace spikekit::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Writes to a file when a path is given, otherwise to the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty()) return;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    file_.open(p, std::ios::binary | std::ios::trunc);
    if (!file_) throw PathError("cannot write " + path);
    os_ = &file_;
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw PathError("cannot write " + path.string());
  return os;
}

// --- experiment settings shared by train and compare-surrogates ----------

struct SettingFlags {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
  bool skip_checksum = false;
  bool record_timing = false;
  std::string out = ".";
};

constexpr std::array<std::pair<const char*, const char*>, 18> kSettings = {{
    {"beta", "membrane decay"},
    {"hidden", "hidden layer width"},
    {"lr", "Adam learning rate"},
    {"batch", "batch size"},
    {"steps", "simulation steps per sample"},
    {"epochs", "training epochs"},
    {"surrogate", "fast_sigmoid | arctan | straight_through"},
    {"k", "fast sigmoid slope"},
    {"alpha", "arctan slope"},
    {"slope", "straight-through slope"},
    {"loss", "membrane | rate_count | mse_count"},
    {"correct-rate", "mse_count target rate of the true class"},
    {"incorrect-rate", "mse_count target rate of the other classes"},
    {"model", "hidden neuron model"},
    {"detach-reset", "true | false: reset terms carry no gradient"},
    {"seed", "training seed"},
    {"eval-seed", "encoding seed for evaluation"},
    {"data-dir", "directory with the MNIST IDX files (default: $SPIKEKIT_DATA_DIR)"},
}};

void add_setting_flags(CLI::App& sub, SettingFlags& f) {
  sub.add_option("--preset", f.preset, "C1 .. C5");
  sub.add_option("--config", f.config, "key = value settings file");
  for (const auto& [key, help] : kSettings) {
    f.options.emplace_back(key, sub.add_option(std::string("--") + key, f.values[key], help));
  }
  sub.add_option("--train-limit", f.train_limit, "use only the first N training images");
  sub.add_option("--test-limit", f.test_limit, "use only the first N test images");
  sub.add_flag("--skip-checksum", f.skip_checksum, "do not verify SHA-256 digests");
  sub.add_flag("--record-timing", f.record_timing, "fill the timing columns of the CSV");
  sub.add_option("--out", f.out, "output directory");
}

ExperimentConfig resolve_config(const SettingFlags& f, ExperimentConfig base) {
  std::vector<std::pair<std::string, std::string>> file;
  if (f.config) file = read_config_file(*f.config);
  std::optional<std::string> preset = f.preset;
  if (!preset) {
    for (const auto& [k, v] : file) {
      if (k == "preset") preset = v;
    }
  }
  ExperimentConfig cfg = preset ? preset_config(*preset) : std::move(base);
  for (const auto& [k, v] : file) {
    if (k != "preset") apply_setting(cfg, k, v);
  }
  for (const auto& [key, opt] : f.options) {
    if (opt->count() == 0) continue;
    try {
      apply_setting(cfg, key, f.values.at(key));
    } catch (const UsageError& e) {
      throw UsageError("--" + key + ": " + e.what());
    }
  }
  if (cfg.data_dir.empty()) {
    if (const char* env = std::getenv("SPIKEKIT_DATA_DIR")) cfg.data_dir = env;
  }
  cfg.validate();
  return cfg;
}

std::string expected_files() {
  std::string s;
  for (const auto& f : mnist_files()) s += (s.empty() ? "" : ", ") + f.name;
  return s;
}

Dataset first_rows(const Dataset& d, std::size_t limit) {
  if (limit == 0 || limit >= d.size()) return d;
  std::vector<std::size_t> rows(limit);
  for (std::size_t i = 0; i < limit; ++i) rows[i] = i;
  return d.subset(rows);
}

std::pair<Dataset, Dataset> load_data(const ExperimentConfig& cfg, const SettingFlags& f) {
  if (cfg.data_dir.empty()) {
    throw PathError("no data directory (use --data-dir or SPIKEKIT_DATA_DIR); expected " +
                    expected_files() + " (optionally .gz)");
  }
  const fs::path dir(cfg.data_dir);
  if (!f.skip_checksum) {
    for (const auto& r : verify_mnist_checksums(dir)) {
      if (r.present && !r.matches) {
        throw FormatError("SHA-256 mismatch for " + r.name + " in " + dir.string() + ": got " +
                          r.digest);
      }
    }
  }
  Dataset train = first_rows(load_mnist(dir, Split::train), f.train_limit);
  Dataset test = first_rows(load_mnist(dir, Split::test), f.test_limit);
  return {std::move(train), std::move(test)};
}

json config_json(const ExperimentConfig& cfg) {
  json out = json::object();
  for (const auto& [k, v] : cfg.fields()) {
    const char* end = v.data() + v.size();
    std::uint64_t u = 0;
    double d = 0.0;
    if (v == "true" || v == "false") {
      out[k] = v == "true";
    } else if (auto r = std::from_chars(v.data(), end, u); r.ec == std::errc() && r.ptr == end) {
      out[k] = u;
    } else if (auto r2 = std::from_chars(v.data(), end, d); r2.ec == std::errc() && r2.ptr == end) {
      out[k] = d;
    } else {
      out[k] = v;
    }
  }
  return out;
}

json epochs_json(const ExperimentResult& r) {
  json arr = json::array();
  for (const auto& e : r.epochs) {
    arr.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"test_acc", e.test_acc},
                   {"epoch_time_s", e.seconds}});
  }
  return arr;
}

void write_json(const fs::path& path, const json& j) {
  auto os = open_output(path);
  os << j.dump(2) << '\n';
}

int cmd_train(const SettingFlags& f, std::ostream& err) {
  const ExperimentConfig cfg = resolve_config(f, ExperimentConfig{});
  const auto [train, test] = load_data(cfg, f);
  const fs::path dir(f.out);
  auto csv = open_output(dir / "metrics.csv");
  csv << "epoch,train_loss,test_acc,epoch_time_s\n" << std::flush;
  const ExperimentResult result = run_experiment(cfg, train, test, [&](const EpochRecord& e) {
    csv << e.epoch << ',' << num(e.train_loss) << ',' << num(e.test_acc) << ','
        << (f.record_timing ? num(e.seconds) : "") << '\n'
        << std::flush;
    err << "epoch " << e.epoch << "/" << cfg.epochs << "  loss " << e.train_loss << "  acc "
        << e.test_acc << "  (" << e.seconds << " s)\n";
  });
  json summary = {{"best_acc", result.best_acc}, {"config", config_json(cfg)}};
  if (cfg.epochs == 0) summary["untrained_acc"] = result.untrained_acc;
  summary["train_samples"] = train.size();
  summary["test_samples"] = test.size();
  summary["epochs"] = epochs_json(result);
  summary["total_time_s"] = result.total_seconds;
  write_json(dir / "summary.json", summary);
  err << "best accuracy " << result.best_acc << "\n";
  return 0;
}

int cmd_compare(const SettingFlags& f, std::ostream& err) {
  ExperimentConfig base = preset_config("C5");
  base.epochs = 10;
  const ExperimentConfig cfg = resolve_config(f, base);
  const auto [train, test] = load_data(cfg, f);
  const fs::path dir(f.out);
  auto csv = open_output(dir / "surrogates.csv");
  csv << "surrogate,best_acc,total_time_s\n" << std::flush;
  const std::array<SurrogateSpec, 3> specs = {
      SurrogateSpec::fast_sigmoid(cfg.surrogate.k), SurrogateSpec::arctan(cfg.surrogate.alpha),
      SurrogateSpec::straight_through(cfg.surrogate.s)};
  json runs = json::array();
  for (const auto& spec : specs) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.surrogate = spec;
    err << "surrogate " << spec.name() << "\n";
    const ExperimentResult r = run_experiment(run_cfg, train, test, [&](const EpochRecord& e) {
      err << "  epoch " << e.epoch << "/" << run_cfg.epochs << "  acc " << e.test_acc << "\n";
    });
    csv << spec.name() << ',' << num(r.best_acc) << ','
        << (f.record_timing ? num(r.total_seconds) : "") << '\n'
        << std::flush;
    runs.push_back({{"surrogate", spec.name()},
                    {"best_acc", r.best_acc},
                    {"config", config_json(run_cfg)},
                    {"epochs", epochs_json(r)},
                    {"total_time_s", r.total_seconds}});
  }
  write_json(dir / "summary.json", {{"runs", runs}});
  return 0;
}

// --- trace ----------------------------------------------------------------

struct TraceFlags {
  std::string model = "lif";
  std::size_t steps = 200;
  std::optional<double> input;
  double beta = 0.9;
  double threshold = 1.0;
  std::string reset = "subtract";
  double alpha = 0.9;
  double rho = 0.95;
  double b_adapt = 0.5;
  double dt = 1.0;
  std::uint64_t seed = 42;
  std::string out;
};

Reset parse_reset(const std::string& s) {
  if (s == "subtract") return Reset::subtract;
  if (s == "zero") return Reset::zero;
  if (s == "none") return Reset::none;
  throw UsageError("--reset: unknown reset '" + s + "' (expected subtract, zero, none)");
}

int cmd_trace(const TraceFlags& f, std::ostream& out) {
  constexpr const char* kModels = "lif, if, izhikevich:{rs,ib,ch,fs}, alif, synaptic, alpha";
  NeuronConfig cfg;
  NeuronModel model{};
  const auto colon = f.model.find(':');
  const std::string base = f.model.substr(0, colon);
  try {
    model = parse_model(base);
    if (model == NeuronModel::izhikevich) {
      cfg.izhikevich = izhikevich_preset(colon == std::string::npos ? "rs" : f.model.substr(colon + 1));
    } else if (colon != std::string::npos) {
      throw UsageError("");
    }
  } catch (const std::exception&) {
    throw UsageError("--model: unknown model '" + f.model + "' (expected " + kModels + ")");
  }
  cfg.beta = f.beta;
  cfg.threshold = f.threshold;
  cfg.reset = parse_reset(f.reset);
  cfg.alpha = f.alpha;
  cfg.rho = f.rho;
  cfg.b_adapt = f.b_adapt;
  cfg.dt = f.dt;
  try {
    cfg.validate(model);
  } catch (const RangeError& e) {
    throw UsageError(e.what());
  }
  const double input = f.input.value_or(model == NeuronModel::izhikevich ? 10.0 : 0.3);

  const SpikingNeuron neuron(model, cfg);
  const auto keys = state_keys(model);
  Sink sink(f.out, out);
  auto& os = *sink;
  os << "t,input";
  for (const auto& k : keys) os << ',' << k;
  os << ",spike\n";
  NeuronState st = neuron.init_state(1, 1);
  const Tensor x = Tensor::full({1, 1}, input);
  for (std::size_t t = 0; t < f.steps; ++t) {
    StepResult r = neuron.step(x, st);
    os << t << ',' << num(input);
    for (const auto& k : keys) os << ',' << num(r.state.get(k).raw()[0]);
    os << ',' << num(r.spk.raw()[0]) << '\n';
    st = std::move(r.state);
  }
  return 0;
}

// --- surrogate curves -----------------------------------------------------

struct CurveFlags {
  double k = 25.0;
  double alpha = 2.0;
  double slope = 1.0;
  std::string range = "-2,2";
  std::size_t points = 401;
  std::string out;
};

std::pair<double, double> parse_range(const std::string& s) {
  const auto comma = s.find(',');
  auto bad = [&] { return UsageError("--range: expected 'lo,hi', got '" + s + "'"); };
  if (comma == std::string::npos) throw bad();
  double lo = 0.0, hi = 0.0;
  const char* mid = s.data() + comma;
  const char* end = s.data() + s.size();
  const auto r1 = std::from_chars(s.data(), mid, lo);
  const auto r2 = std::from_chars(mid + 1, end, hi);
  if (r1.ec != std::errc() || r1.ptr != mid || r2.ec != std::errc() || r2.ptr != end ||
      !std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw bad();
  }
  return {lo, hi};
}

int cmd_curves(const CurveFlags& f, std::ostream& out) {
  if (f.points < 2) throw UsageError("--points: need at least 2 points");
  const auto [lo, hi] = parse_range(f.range);
  const std::array<SurrogateSpec, 3> specs = {SurrogateSpec::fast_sigmoid(f.k),
                                              SurrogateSpec::arctan(f.alpha),
                                              SurrogateSpec::straight_through(f.slope)};
  for (const auto& s : specs) {
    try {
      s.validate();
    } catch (const RangeError& e) {
      throw UsageError(e.what());
    }
  }
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double denom = static_cast<double>(f.points - 1);
  std::vector<double> xs(f.points);
  for (std::size_t i = 0; i < f.points; ++i) {
    const double m = 2.0 * static_cast<double>(i) - denom;
    xs[i] = center + half * m / denom;
  }
  const Tensor x({f.points}, xs);
  const Tensor fwd = heaviside(x);
  std::array<Tensor, 3> grads;
  for (std::size_t j = 0; j < 3; ++j) grads[j] = smooth_gradient(specs[j], x);

  Sink sink(f.out, out);
  auto& os = *sink;
  os << "x,forward,backward_fast_sigmoid,backward_arctan,backward_straight_through\n";
  for (std::size_t i = 0; i < f.points; ++i) {
    os << num(xs[i]) << ',' << num(fwd.raw()[i]);
    for (const auto& g : grads) os << ',' << num(g.raw()[i]);
    os << '\n';
  }
  return 0;
}

// --- encode demo ----------------------------------------------------------

struct EncodeFlags {
  std::string method;
  std::size_t steps = 25;
  std::uint64_t seed = 42;
  std::string signal;
  double value = 0.5;
  std::size_t width = 8;
  std::size_t channels = 4;
  double threshold = 0.1;
  bool signed_output = false;
  std::string mapping = "linear";
  double tau = 5.0;
  double gain = 1.0;
  std::string out;
};

Tensor demo_image(const EncodeFlags& f) {
  const std::size_t n = f.width * f.width;
  std::vector<double> px(n, f.value);
  if (f.signal == "gradient") {
    const double top = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < n; ++i) px[i] = n > 1 ? static_cast<double>(i) / top : 1.0;
  }
  return Tensor({n}, std::move(px));
}

Tensor demo_signal(const EncodeFlags& f) {
  std::vector<double> xs(f.steps * f.channels, f.value);
  if (f.signal == "sine") {
    for (std::size_t t = 0; t < f.steps; ++t) {
      for (std::size_t c = 0; c < f.channels; ++c) {
        const double period = 8.0 + 4.0 * static_cast<double>(c);
        xs[t * f.channels + c] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
      }
    }
  }
  return Tensor({f.steps, f.channels}, std::move(xs));
}

void write_raster(std::ostream& os, const SpikeTrain& train) {
  os << "t,index,spike\n";
  if (train.empty()) return;
  const auto& shape = train.data.shape();
  const auto raw = train.data.raw();
  const std::size_t per_step = train.data.size() / train.num_steps;
  const bool polar = shape.size() == 3 && shape[2] == 2;
  for (std::size_t t = 0; t < train.num_steps; ++t) {
    for (std::size_t j = 0; j < per_step; ++j) {
      const double v = raw[t * per_step + j];
      if (v == 0.0) continue;
      if (polar) {
        os << t << ',' << j / 2 << ',' << (j % 2 == 0 ? "1" : "-1") << '\n';
      } else {
        os << t << ',' << j << ',' << num(v) << '\n';
      }
    }
  }
}

int cmd_encode(EncodeFlags f, std::ostream& out) {
  const bool image = f.method == "rate" || f.method == "latency";
  if (!image && f.method != "delta" && f.method != "eeg") {
    throw UsageError("--method: unknown method '" + f.method +
                     "' (expected rate, latency, delta, eeg)");
  }
  if (f.signal.empty()) f.signal = image ? "gradient" : "sine";
  if (f.signal != "constant" && f.signal != (image ? "gradient" : "sine")) {
    throw UsageError("--signal: '" + f.signal + "' is not available for " + f.method +
                     " (expected " + (image ? "gradient" : "sine") + " or constant)");
  }
  if (f.width == 0 || f.channels == 0) throw UsageError("--width and --channels must be >= 1");

  SpikeTrain train;
  Rng rng(f.seed);
  try {
    if (f.method == "rate") {
      train = rate_encode(demo_image(f), f.steps, rng);
    } else if (f.method == "latency") {
      LatencyMapping m = LatencyMapping::linear;
      if (f.mapping == "exponential") {
        m = LatencyMapping::exponential;
      } else if (f.mapping != "linear") {
        throw UsageError("--mapping: expected linear or exponential");
      }
      train = latency_encode(demo_image(f), f.steps, m, f.tau);
    } else if (f.steps > 0 && f.method == "delta") {
      train = delta_encode(demo_signal(f), f.threshold, f.signed_output);
    } else if (f.steps > 0) {
      EegParams p;
      p.method = EegMethod::threshold_crossing;
      p.gain = f.gain;
      train = eeg_encode(demo_signal(f), p, &rng);
    }
  } catch (const RangeError& e) {
    throw UsageError(e.what());
  }
  Sink sink(f.out, out);
  write_raster(*sink, train);
  return 0;
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiking neural network experiments", "spikekit"};
  app.require_subcommand(1);

  SettingFlags train_flags;
  auto* train = app.add_subcommand("train", "train a spiking MLP on MNIST");
  add_setting_flags(*train, train_flags);

  SettingFlags compare_flags;
  auto* compare =
      app.add_subcommand("compare-surrogates", "train once per surrogate gradient");
  add_setting_flags(*compare, compare_flags);

  TraceFlags trace_flags;
  auto* trace = app.add_subcommand("trace", "single-neuron response to a constant input");
  trace->add_option("--model", trace_flags.model,
                    "lif | if | izhikevich:{rs,ib,ch,fs} | alif | synaptic | alpha");
  trace->add_option("--steps", trace_flags.steps, "number of steps")->capture_default_str();
  trace->add_option("--input", trace_flags.input,
                    "constant input (default 0.3, or 10 for izhikevich)");
  trace->add_option("--beta", trace_flags.beta, "membrane decay")->capture_default_str();
  trace->add_option("--threshold", trace_flags.threshold)->capture_default_str();
  trace->add_option("--reset", trace_flags.reset, "subtract | zero | none")->capture_default_str();
  trace->add_option("--alpha", trace_flags.alpha, "synaptic decay")->capture_default_str();
  trace->add_option("--rho", trace_flags.rho, "adaptation decay")->capture_default_str();
  trace->add_option("--b-adapt", trace_flags.b_adapt, "adaptation strength")
      ->capture_default_str();
  trace->add_option("--dt", trace_flags.dt, "izhikevich step (ms)")->capture_default_str();
  trace->add_option("--seed", trace_flags.seed);
  trace->add_option("--out", trace_flags.out, "CSV path (default: stdout)");

  CurveFlags curve_flags;
  auto* curves = app.add_subcommand("surrogate-curves", "sample the surrogate derivatives");
  curves->add_option("--k", curve_flags.k, "fast sigmoid slope")->capture_default_str();
  curves->add_option("--alpha", curve_flags.alpha, "arctan slope")->capture_default_str();
  curves->add_option("--slope", curve_flags.slope, "straight-through slope")
      ->capture_default_str();
  curves->add_option("--range", curve_flags.range, "lo,hi")->capture_default_str();
  curves->add_option("--points", curve_flags.points)->capture_default_str();
  curves->add_option("--seed", trace_flags.seed);
  curves->add_option("--out", curve_flags.out, "CSV path (default: stdout)");

  EncodeFlags enc_flags;
  auto* encode = app.add_subcommand("encode-demo", "spike raster of a built-in input");
  encode->add_option("--method", enc_flags.method, "rate | latency | delta | eeg")->required();
  encode->add_option("--steps", enc_flags.steps)->capture_default_str();
  encode->add_option("--seed", enc_flags.seed)->capture_default_str();
  encode->add_option("--signal", enc_flags.signal,
                     "gradient (rate, latency), sine (delta, eeg) or constant");
  encode->add_option("--value", enc_flags.value, "level of the constant signal")
      ->capture_default_str();
  encode->add_option("--width", enc_flags.width, "image side length")->capture_default_str();
  encode->add_option("--channels", enc_flags.channels, "signal channels")->capture_default_str();
  encode->add_option("--threshold", enc_flags.threshold, "delta threshold")
      ->capture_default_str();
  encode->add_flag("--signed", enc_flags.signed_output, "signed delta output");
  encode->add_option("--mapping", enc_flags.mapping, "latency: linear | exponential")
      ->capture_default_str();
  encode->add_option("--tau", enc_flags.tau, "latency time constant")->capture_default_str();
  encode->add_option("--gain", enc_flags.gain, "eeg level = mean + gain * std")
      ->capture_default_str();
  encode->add_option("--out", enc_flags.out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "spikekit: error: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_flags, err);
    if (compare->parsed()) return cmd_compare(compare_flags, err);
    if (trace->parsed()) return cmd_trace(trace_flags, out);
    if (curves->parsed()) return cmd_curves(curve_flags, out);
    if (encode->parsed()) return cmd_encode(enc_flags, out);
  } catch (const UsageError& e) {
    err << "spikekit: error: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "spikekit: error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}

}  // namespace spikekit::cli
