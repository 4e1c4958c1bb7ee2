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
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "support.hpp"

namespace spikekit {
namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"spikekit"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CliTrace, LifColumnsAndRows) {
  const CliRun r = run_cli({"trace", "--model", "lif", "--steps", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 51u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "input", "mem", "spike"}));
  bool spiked = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stoul(rows[i][0]), i - 1);
    const double s = std::stod(rows[i].back());
    EXPECT_TRUE(s == 0.0 || s == 1.0);
    spiked = spiked || s == 1.0;
  }
  EXPECT_TRUE(spiked);
}

TEST(CliTrace, ZeroInputKeepsIfMembraneAtRest) {
  const CliRun r = run_cli({"trace", "--model", "if", "--input", "0", "--steps", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 21u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i][2]), 0.0);
    EXPECT_EQ(std::stod(rows[i].back()), 0.0);
  }
}

TEST(CliTrace, IzhikevichPresetAndFile) {
  const auto dir = testing::temp_dir("cli_trace");
  const auto file = dir / "izh.csv";
  const CliRun r = run_cli({"trace", "--model", "izhikevich:fs", "--out", file.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(slurp(file));
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows[0].front(), "t");
  EXPECT_EQ(rows[0].back(), "spike");
  EXPECT_NE(std::find(rows[0].begin(), rows[0].end(), "u"), rows[0].end());
  int spikes = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) spikes += std::stod(rows[i].back()) == 1.0;
  EXPECT_GT(spikes, 0);
}

TEST(CliTrace, EveryModelRuns) {
  for (const char* m : {"lif", "if", "izhikevich", "izhikevich:rs", "izhikevich:ib", "izhikevich:ch",
                        "alif", "synaptic", "alpha"}) {
    const CliRun r = run_cli({"trace", "--model", m, "--steps", "10"});
    EXPECT_EQ(r.code, 0) << m << ": " << r.err;
    EXPECT_EQ(parse_csv(r.out).size(), 11u) << m;
  }
}

TEST(CliTrace, UsageErrors) {
  const CliRun r = run_cli({"trace", "--model", "hodgkin"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("spikekit: error:"), std::string::npos);
  EXPECT_EQ(run_cli({"trace", "--steps", "abc"}).code, 2);
  EXPECT_EQ(run_cli({"trace", "--bogus"}).code, 2);
  EXPECT_EQ(run_cli({"nosuchcommand"}).code, 2);
  EXPECT_EQ(run_cli({"trace", "--beta", "1.5"}).code, 2);
}

TEST(CliSurrogateCurves, CentreSymmetryAndForward) {
  const CliRun r = run_cli({"surrogate-curves", "--range=-2,2", "--points", "401"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 402u);
  ASSERT_EQ(rows[0].size(), 5u);
  EXPECT_EQ(rows[0][0], "x");
  const auto& mid = rows[201];
  EXPECT_DOUBLE_EQ(std::stod(mid[0]), 0.0);
  EXPECT_EQ(std::stod(mid[1]), 0.0);
  EXPECT_NEAR(std::stod(mid[2]), 12.5, 1e-12);
  EXPECT_NEAR(std::stod(mid[3]), 2.0 / 3.141592653589793, 1e-12);
  EXPECT_NEAR(std::stod(mid[4]), 1.0, 1e-12);
  for (std::size_t i = 1; i <= 401; ++i) {
    const auto& a = rows[i];
    const auto& b = rows[402 - i];
    EXPECT_NEAR(std::stod(a[0]), -std::stod(b[0]), 1e-12);
    for (std::size_t c = 2; c < 5; ++c) EXPECT_NEAR(std::stod(a[c]), std::stod(b[c]), 1e-12);
    const double f = std::stod(a[1]);
    EXPECT_TRUE(f == 0.0 || f == 1.0);
    EXPECT_EQ(f, std::stod(a[0]) > 0 ? 1.0 : 0.0);
  }
  EXPECT_EQ(run_cli({"surrogate-curves", "--range", "1,-1"}).code, 2);
  EXPECT_EQ(run_cli({"surrogate-curves", "--k", "-1"}).code, 2);
}

TEST(CliEncodeDemo, Examples) {
  CliRun r = run_cli({"encode-demo", "--method", "latency", "--signal", "constant", "--value", "1",
                      "--width", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out), (std::vector<std::vector<std::string>>{{"t", "index", "spike"},
                                                                    {"0", "0", "1"}}));
  r = run_cli({"encode-demo", "--method", "rate", "--steps", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out).size(), 1u);
  r = run_cli({"encode-demo", "--method", "delta", "--signal", "constant"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out).size(), 1u);
  r = run_cli({"encode-demo", "--method", "eeg"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(parse_csv(r.out).size(), 1u);
  r = run_cli({"encode-demo", "--method", "rate", "--signal", "constant", "--value", "1",
               "--steps", "4", "--width", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out).size(), 1u + 4u * 4u);
  EXPECT_EQ(run_cli({"encode-demo", "--method", "morse"}).code, 2);
  EXPECT_EQ(run_cli({"encode-demo"}).code, 2);
}

TEST(CliEncodeDemo, SeededRateIsReproducible) {
  const CliRun a = run_cli({"encode-demo", "--method", "rate", "--seed", "7"});
  const CliRun b = run_cli({"encode-demo", "--method", "rate", "--seed", "7"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliTrain, MissingDataNamesFiles) {
  const auto dir = testing::temp_dir("cli_nodata");
  const CliRun r = run_cli({"train", "--epochs", "0", "--data-dir", dir.string(), "--out",
                            (dir / "o").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("train-images-idx3-ubyte"), std::string::npos) << r.err;
}

TEST(CliTrain, UsageErrors) {
  EXPECT_EQ(run_cli({"train", "--preset", "C9"}).code, 2);
  EXPECT_EQ(run_cli({"train", "--beta", "2"}).code, 2);
  EXPECT_EQ(run_cli({"train", "--surrogate", "relu"}).code, 2);
  EXPECT_EQ(run_cli({"train", "--config", "/nonexistent/spikekit.cfg"}).code, 1);
}

class CliMnist : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!testing::mnist_available()) GTEST_SKIP() << "MNIST files not found";
  }
  static std::string data() { return testing::mnist_dir().string(); }
};

TEST_F(CliMnist, ZeroEpochsWritesHeaderAndUntrainedAccuracy) {
  const auto dir = testing::temp_dir("cli_train0");
  const CliRun r = run_cli({"train", "--preset", "C4", "--epochs", "0", "--test-limit", "500",
                            "--data-dir", data(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(slurp(dir / "metrics.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"epoch", "train_loss", "test_acc", "epoch_time_s"}));
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  ASSERT_TRUE(j.contains("untrained_acc"));
  EXPECT_GE(j["untrained_acc"].get<double>(), 0.0);
  EXPECT_LE(j["untrained_acc"].get<double>(), 1.0);
  EXPECT_EQ(j["best_acc"].get<double>(), j["untrained_acc"].get<double>());
  EXPECT_EQ(j["config"]["preset"], "C4");
  EXPECT_DOUBLE_EQ(j["config"]["beta"].get<double>(), 0.9);
  EXPECT_EQ(j["config"]["hidden"].get<int>(), 128);
}

TEST_F(CliMnist, PresetsAndConfigPrecedence) {
  const auto dir = testing::temp_dir("cli_cfg");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# overrides\nbeta = 0.7\nhidden = 32\nlr=0.004\n";
  }
  const CliRun r = run_cli({"train", "--preset", "C5", "--config", (dir / "run.cfg").string(),
                            "--hidden", "16", "--epochs", "0", "--test-limit", "100",
                            "--data-dir", data(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_DOUBLE_EQ(j["config"]["beta"].get<double>(), 0.7);
  EXPECT_EQ(j["config"]["hidden"].get<int>(), 16);
  EXPECT_DOUBLE_EQ(j["config"]["lr"].get<double>(), 0.004);
  EXPECT_EQ(j["config"]["epochs"].get<int>(), 0);
  EXPECT_EQ(j["config"]["preset"], "C5");
}

TEST_F(CliMnist, TrainingIsDeterministic) {
  const auto a = testing::temp_dir("cli_det_a");
  const auto b = testing::temp_dir("cli_det_b");
  for (const auto& d : {a, b}) {
    const CliRun r = run_cli({"train", "--preset", "C4", "--epochs", "1", "--hidden", "16",
                              "--train-limit", "300", "--test-limit", "200", "--seed", "5",
                              "--data-dir", data(), "--out", d.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const std::string ca = slurp(a / "metrics.csv");
  EXPECT_EQ(ca, slurp(b / "metrics.csv"));
  const auto rows = parse_csv(ca);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "1");
  EXPECT_EQ(rows[1][3], "");
}

}  // namespace
}  // namespace spikekit
