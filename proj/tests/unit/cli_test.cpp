#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pporpe/cli/commands.hpp"
#include "pporpe/cli/config_io.hpp"
#include "pporpe/cli/csv_io.hpp"
#include "pporpe/cli/surface.hpp"
#include "pporpe/cli/weights_io.hpp"
#include "pporpe/errors.hpp"

namespace pporpe::cli {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pporpe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::string> quick_train(const fs::path& out, const std::string& seed = "0") {
    return {"train", "--env", "double-integrator", "--method", "rpe_adaptive", "--episodes", "4",
            "--steps-per-update", "10", "--batch", "32", "--hidden", "8,8", "--seed", seed,
            "--out", out.string()};
  }

  fs::path dir_;
};

TEST_F(CliTest, TrainWritesArtifacts) {
  const auto r = cli(quick_train(dir_ / "run"));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"log.csv", "manifest.txt", "timing.csv", "weights.bin"})
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  const auto rows = read_csv(dir_ / "run" / "log.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0][0], "episode");
  EXPECT_EQ(rows[0][1], "return");
  EXPECT_EQ(rows[0][2], "epsilon");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][0], std::to_string(i - 1));
}

TEST_F(CliTest, CartpoleTrainProducesFullLog) {
  const auto r = cli({"train", "--env", "cartpole", "--method", "rpe_adaptive", "--episodes", "300",
                      "--seed", "0", "--hidden", "8", "--steps-per-update", "50", "--out",
                      (dir_ / "cp").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_csv(dir_ / "cp" / "log.csv").size(), 301u);
}

TEST_F(CliTest, DefaultOutputDirectoryHonoursEnvironment) {
  ::setenv("PPORPE_OUT", (dir_ / "base").string().c_str(), 1);
  auto args = quick_train("");
  args.resize(args.size() - 2);  // drop --out
  const auto r = cli(args);
  ::unsetenv("PPORPE_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "base" / "double-integrator" / "rpe_adaptive" / "0" / "log.csv"));
}

TEST_F(CliTest, RejectsUnknownMethod) {
  const auto r = cli({"train", "--method", "ppos"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("rpe_adaptive"), std::string::npos);
  EXPECT_NE(r.err.find("ppo_clip"), std::string::npos);
}

TEST_F(CliTest, RejectsUnregularizedOnCommandLine) {
  EXPECT_EQ(cli({"train", "--method", "unregularized"}).code, 2);
}

TEST_F(CliTest, BetaTooLargeIsConfigError) {
  const auto r = cli({"train", "--beta", "0.95", "--episodes", "1", "--out", (dir_ / "x").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("config error"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "x" / "log.csv"));
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  {
    std::ofstream cfg(dir_ / "run.cfg");
    cfg << "# test config\nenv=pendulum-swingup\nmethod=ppo_rb\neta=0.25\nepisodes=9\nhidden_layers=8\n";
  }
  const auto r = cli({"train", "--config", (dir_ / "run.cfg").string(), "--episodes", "2", "--out",
                      (dir_ / "run").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const RunManifest m = read_manifest(dir_ / "run" / "manifest.txt");
  EXPECT_EQ(m.config.env, "pendulum-swingup");
  EXPECT_EQ(m.config.surrogate.method, Method::ppo_rb);
  EXPECT_EQ(m.config.surrogate.eta, 0.25);
  EXPECT_EQ(m.config.episodes, 2);
}

TEST_F(CliTest, ManifestReproducesRun) {
  ASSERT_EQ(cli(quick_train(dir_ / "a", "4")).code, 0);
  const auto r = cli({"train", "--config", (dir_ / "a" / "manifest.txt").string(), "--out", (dir_ / "b").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_text_file(dir_ / "a" / "log.csv"), read_text_file(dir_ / "b" / "log.csv"));
}

TEST_F(CliTest, MalformedConfigIsConfigError) {
  {
    std::ofstream cfg(dir_ / "bad.cfg");
    cfg << "episodes 3\n";
  }
  EXPECT_EQ(cli({"train", "--config", (dir_ / "bad.cfg").string()}).code, 2);
  {
    std::ofstream cfg(dir_ / "bad.cfg");
    cfg << "colour=blue\n";
  }
  EXPECT_EQ(cli({"train", "--config", (dir_ / "bad.cfg").string()}).code, 2);
}

TEST(Manifest, RoundTrip) {
  RunManifest m;
  m.config.env = "cartpole";
  m.config.surrogate.method = Method::ppo_rb;
  m.config.surrogate.beta = 0.3;
  m.config.surrogate.epsilon = 0.1 + 0.2;  // not representable exactly in short decimal
  m.config.surrogate.eta = 1.0 / 3.0;
  m.config.threshold.per_sample = true;
  m.config.learning_rate = 1e-4 / 3.0;
  m.config.hidden_layers = {7, 5, 3};
  m.config.activation = Activation::tanh;
  m.config.seed = 18446744073709551615ull;
  m.version = "0.1.0+abc";
  m.timestamp = "2024-01-01T00:00:00Z";
  m.out_dir = "runs/cartpole/ppo_rb/1";
  const RunManifest back = parse_manifest(render_manifest(m));
  EXPECT_TRUE(back.config == m.config);
  EXPECT_EQ(back.version, m.version);
  EXPECT_EQ(back.timestamp, m.timestamp);
  EXPECT_EQ(back.out_dir, m.out_dir);
  EXPECT_EQ(render_manifest(back), render_manifest(m));
}

TEST_F(CliTest, ManifestWrittenMatchesResolvedConfig) {
  ASSERT_EQ(cli(quick_train(dir_ / "run", "17")).code, 0);
  const RunManifest m = read_manifest(dir_ / "run" / "manifest.txt");
  EXPECT_EQ(m.config.seed, 17u);
  EXPECT_EQ(m.config.hidden_layers, (std::vector<int>{8, 8}));
  EXPECT_FALSE(m.version.empty());
}

TEST_F(CliTest, LogIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(cli(quick_train(dir_ / "a")).code, 0);
  ASSERT_EQ(cli(quick_train(dir_ / "b")).code, 0);
  EXPECT_EQ(read_text_file(dir_ / "a" / "log.csv"), read_text_file(dir_ / "b" / "log.csv"));
  EXPECT_EQ(read_text_file(dir_ / "a" / "weights.bin"), read_text_file(dir_ / "b" / "weights.bin"));
}

TEST_F(CliTest, CsvNumbersCarryNineSignificantDigits) {
  ASSERT_EQ(cli(quick_train(dir_ / "run")).code, 0);
  const auto rows = read_csv(dir_ / "run" / "log.csv");
  const std::string& ret = rows[1][1];
  std::size_t digits = 0;
  for (char ch : ret.substr(0, ret.find_first_of("eE"))) digits += std::isdigit(static_cast<unsigned char>(ch)) != 0;
  EXPECT_GE(digits, 9u) << ret;
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST_F(CliTest, EvalUsesManifestAndIsDeterministic) {
  ASSERT_EQ(cli(quick_train(dir_ / "run")).code, 0);
  const std::string weights = (dir_ / "run" / "weights.bin").string();
  auto r = cli({"eval", "--weights", weights, "--episodes", "5", "--seed", "3", "--out", (dir_ / "e1").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("median"), std::string::npos);
  r = cli({"eval", "--weights", weights, "--episodes", "5", "--seed", "3", "--out", (dir_ / "e2").string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_text_file(dir_ / "e1" / "eval.csv"), read_text_file(dir_ / "e2" / "eval.csv"));
  EXPECT_EQ(read_csv(dir_ / "e1" / "eval.csv").size(), 6u);
}

TEST_F(CliTest, EvalSingleEpisodeMedianIsThatReturn) {
  ASSERT_EQ(cli(quick_train(dir_ / "run")).code, 0);
  const auto r = cli({"eval", "--weights", (dir_ / "run" / "weights.bin").string(), "--episodes", "1"});
  ASSERT_EQ(r.code, 0);
  const auto rows = read_csv(dir_ / "run" / "eval.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NE(r.out.find("median " + rows[1][1] + "\n"), std::string::npos);
}

TEST_F(CliTest, EvalMissingFileIsFailure) {
  EXPECT_EQ(cli({"eval", "--weights", (dir_ / "none.bin").string(), "--env", "cartpole"}).code, 1);
}

TEST_F(CliTest, EvalCorruptedWeightsIsFailure) {
  ASSERT_EQ(cli(quick_train(dir_ / "run")).code, 0);
  const fs::path w = dir_ / "run" / "weights.bin";
  std::string bytes = read_text_file(w);
  bytes[bytes.size() / 2] ^= 0x01;
  std::ofstream(w, std::ios::binary) << bytes;
  const auto r = cli({"eval", "--weights", w.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("checksum"), std::string::npos);
}

TEST(Weights, RoundTripAndTruncation) {
  std::mt19937_64 rng(1);
  Mlp a({3, 4, 2}, Activation::tanh), b({2, 1});
  a.initialize(rng);
  b.parameters() << 0.1, -0.2, 1e300;
  const auto bytes = encode_weights({{"actor", a}, {"critic", b}});
  const auto back = decode_weights(bytes);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(find_net(back, "actor").parameters(), a.parameters());
  EXPECT_EQ(find_net(back, "actor").activation(), Activation::tanh);
  EXPECT_EQ(find_net(back, "critic").layer_sizes(), b.layer_sizes());
  EXPECT_THROW(find_net(back, "baseline"), WeightsError);
  auto cut = bytes;
  cut.resize(cut.size() - 3);
  EXPECT_THROW(decode_weights(cut), WeightsError);
}

TEST_F(CliTest, SurfaceArgmaxAndFlatRegion) {
  const fs::path out = dir_ / "surface.csv";
  ASSERT_EQ(cli({"surface", "--rho-min", "0", "--rho-max", "3", "--step", "1e-4", "--epsilon", "0.1",
                 "--beta", "0.5", "--eta", "0.3", "--advantage", "1", "--out", out.string()}).code, 0);
  const auto rows = read_csv(out);
  ASSERT_GT(rows.size(), 30000u);
  EXPECT_EQ(rows[0][0], "rho");
  double best = -1e300, arg = 0;
  bool saw_center = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double rho = std::stod(rows[i][0]);
    const double rpe = std::stod(rows[i][5]);
    if (rows[i][9].empty() && rpe > best) {
      best = rpe;
      arg = rho;
    }
    if (rows[i][9] == "center") {
      saw_center = true;
      for (int c = 2; c <= 5; ++c) EXPECT_EQ(std::stod(rows[i][static_cast<std::size_t>(c)]), 1.0);
    }
  }
  EXPECT_TRUE(saw_center);
  EXPECT_NEAR(arg, 1.22222, 1e-3);

  SurfaceOptions o;
  o.epsilon = 0.2;
  o.eta = 0.0;
  o.step = 1e-3;
  for (const auto& row : compute_surface(o))
    if (row.rho > 1.2 + 1e-12) EXPECT_NEAR(row.ppo, 1.2, 1e-15);
}

TEST_F(CliTest, SurfaceInvalidGridIsUsageError) {
  EXPECT_EQ(cli({"surface", "--rho-min", "2", "--rho-max", "1", "--out", (dir_ / "s.csv").string()}).code, 2);
  EXPECT_EQ(cli({"surface", "--step", "0", "--out", (dir_ / "s.csv").string()}).code, 2);
}

TrainRecord rec(int episode, double ret) {
  TrainRecord r;
  r.episode = episode;
  r.episode_return = ret;
  r.epsilon_mean = 0.1 * episode;
  return r;
}

TEST(Aggregate, HandComputedConfidenceInterval) {
  std::map<std::uint64_t, std::vector<TrainRecord>> runs;
  runs[0] = {rec(0, 1.0), rec(1, 10.0)};
  runs[1] = {rec(0, 2.0), rec(1, 10.0)};
  runs[2] = {rec(0, 6.0), rec(1, 10.0)};
  const auto rows = aggregate(runs);
  ASSERT_EQ(rows.size(), 2u);
  // mean 3, sample sd sqrt(((-2)^2 + (-1)^2 + 3^2) / 2) = sqrt(7)
  EXPECT_NEAR(rows[0].return_mean, 3.0, 1e-15);
  EXPECT_NEAR(rows[0].return_ci95, 1.96 * std::sqrt(7.0) / std::sqrt(3.0), 1e-12);
  EXPECT_EQ(rows[1].return_ci95, 0.0);
  EXPECT_EQ(rows[0].n, 3);
}

TEST(Aggregate, SingleSeedEqualsRun) {
  std::map<std::uint64_t, std::vector<TrainRecord>> runs;
  runs[4] = {rec(0, -3.5), rec(1, 2.25)};
  const auto rows = aggregate(runs);
  EXPECT_EQ(rows[0].return_mean, -3.5);
  EXPECT_EQ(rows[1].return_mean, 2.25);
  EXPECT_EQ(rows[1].epsilon_mean, 0.1);
  EXPECT_EQ(rows[0].return_ci95, 0.0);
}

TEST_F(CliTest, SweepOrderInvariant) {
  const std::vector<std::string> common{"sweep", "--env", "double-integrator", "--episodes", "3",
                                        "--steps-per-update", "10", "--batch", "32", "--hidden", "8"};
  auto a = common;
  a.insert(a.end(), {"--seeds", "0,1", "--out", (dir_ / "a").string()});
  auto b = common;
  b.insert(b.end(), {"--seeds", "1,0", "--jobs", "2", "--out", (dir_ / "b").string()});
  ASSERT_EQ(cli(a).code, 0);
  ASSERT_EQ(cli(b).code, 0);
  EXPECT_EQ(read_text_file(dir_ / "a" / "aggregate.csv"), read_text_file(dir_ / "b" / "aggregate.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "1" / "log.csv"));
  EXPECT_EQ(read_text_file(dir_ / "a" / "0" / "log.csv"), read_text_file(dir_ / "b" / "0" / "log.csv"));
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = PPORPE_CLI_BINARY;
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " train --method ppos 2>/dev/null").c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " eval --weights /nonexistent/w.bin --env cartpole 2>/dev/null").c_str())), 1);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " --help >/dev/null").c_str())), 0);
}

}  // namespace
}  // namespace pporpe::cli
