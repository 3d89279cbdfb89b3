#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ntgof/cli/csv.hpp"
#include "ntgof/cli/json_writer.hpp"
#include "ntgof/cli/run.hpp"
#include "ntgof/random.hpp"

namespace {

namespace fs = std::filesystem;
using ntgof::cli::Command;
using ntgof::cli::Json;
using ntgof::cli::RunConfig;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ntgof_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path, std::ios::binary) << text;
    return path;
  }

  static int run(const RunConfig& config, std::string* out_text = nullptr,
                 std::string* err_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = ntgof::cli::run(config, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
  }

  fs::path dir_;
};

std::string uniform_csv(std::uint64_t seed, std::size_t n) {
  ntgof::Rng rng(seed);
  std::string text = "x\n";
  for (std::size_t i = 0; i < n; ++i) text += std::to_string(ntgof::uniform01(rng)) + "\n";
  return text;
}

TEST(Csv, ParsesAndReportsLineNumbers) {
  const auto table = ntgof::cli::parse_csv("x,y\n1,2\n3.5,-4e-1\n", {"x", "y"});
  EXPECT_EQ(table.rows(), 2u);
  EXPECT_DOUBLE_EQ(table.column("y")[1], -0.4);
  try {
    ntgof::cli::parse_csv("x\n1\nabc\n", {"x"}, "data.csv");
    FAIL();
  } catch (const ntgof::cli::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("data.csv:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ntgof::cli::parse_csv("", {"x"}), ntgof::cli::InputError);
  EXPECT_THROW(ntgof::cli::parse_csv("x\n", {"x"}), ntgof::cli::InputError);
  EXPECT_THROW(ntgof::cli::parse_csv("z\n1\n", {"x"}), ntgof::cli::InputError);
  EXPECT_THROW(ntgof::cli::parse_csv("x,y\n1\n", {"x", "y"}), ntgof::cli::InputError);
}

TEST(Json, SeventeenDigitsRoundTrip) {
  Json doc;
  doc["v"] = 0.1;
  doc["third"] = 1.0 / 3.0;
  const auto text = ntgof::cli::to_json_text(doc);
  EXPECT_NE(text.find("0.10000000000000001"), std::string::npos) << text;
  const auto back = Json::parse(text);
  EXPECT_EQ(back["third"].get<double>(), 1.0 / 3.0);
}

TEST_F(CliTest, UniformityReportRoundTrips) {
  RunConfig config;
  config.input = write("u.csv", uniform_csv(1, 200));
  config.replications = 500;
  config.seed = 42;
  config.output = dir_ / "report.json";
  ASSERT_EQ(run(config), 0);
  std::ifstream in(config.output);
  const auto report = Json::parse(in);
  const double p = report["p_value"].get<double>();
  EXPECT_EQ(report["decision"].get<std::string>(), p <= config.alpha ? "reject" : "accept");
  EXPECT_EQ(report["series"].size(), report["dimension"].get<std::size_t>());
  EXPECT_EQ(report["penalty"].get<std::string>(), "schwarz");
}

TEST_F(CliTest, ByteIdenticalReports) {
  RunConfig config;
  config.input = write("u.csv", uniform_csv(2, 150));
  config.replications = 300;
  config.seed = 5;
  std::string first;
  std::string second;
  ASSERT_EQ(run(config, &first), 0);
  ASSERT_EQ(run(config, &second), 0);
  EXPECT_EQ(first, second);
}

TEST_F(CliTest, UniformNullMostlyAccepted) {
  int accepted = 0;
  constexpr int kSeeds = 400;
  for (int seed = 0; seed < kSeeds; ++seed) {
    RunConfig config;
    config.input = write("u.csv", uniform_csv(1000 + seed, 50));
    config.replications = 2000;
    config.seed = 42 + seed;
    std::string text;
    ASSERT_EQ(run(config, &text), 0);
    accepted += Json::parse(text)["decision"].get<std::string>() == "accept" ? 1 : 0;
  }
  EXPECT_GE(accepted, static_cast<int>(0.93 * kSeeds));
}

TEST_F(CliTest, PerfectDependenceRejected) {
  std::string text = "x,y\n";
  for (int i = 0; i < 200; ++i) {
    const double v = std::sin(0.37 * i);
    text += std::to_string(v) + "," + std::to_string(v) + "\n";
  }
  RunConfig config;
  config.kind = "independence";
  config.input = write("xy.csv", text);
  config.replications = 500;
  std::string out;
  ASSERT_EQ(run(config, &out), 0);
  EXPECT_EQ(Json::parse(out)["decision"].get<std::string>(), "reject");
}

TEST_F(CliTest, ExitCodes) {
  RunConfig config;
  config.input = write("empty.csv", "");
  std::string err;
  EXPECT_EQ(run(config, nullptr, &err), ntgof::cli::kInputError);
  EXPECT_NE(err.find("input error"), std::string::npos);

  config.input = write("bad.csv", "x\n0.5\n0.2\nnope\n");
  EXPECT_EQ(run(config, nullptr, &err), ntgof::cli::kInputError);
  EXPECT_NE(err.find(":4"), std::string::npos) << err;

  config.input = dir_ / "missing.csv";
  EXPECT_EQ(run(config), ntgof::cli::kInputError);

  config.input = write("out.csv", "x\n0.5\n1.7\n");
  EXPECT_EQ(run(config), ntgof::cli::kInputError);

  config.kind = "composite:normal";
  config.input = write("flat.csv", "x\n2\n2\n2\n2\n");
  EXPECT_EQ(run(config, nullptr, &err), ntgof::cli::kNumericError);

  RunConfig few;
  few.input = write("u.csv", uniform_csv(3, 20));
  few.replications = 50;
  EXPECT_EQ(run(few), ntgof::cli::kInputError);
  few.replications = 100;
  few.kind = "bogus";
  EXPECT_EQ(run(few), ntgof::cli::kInputError);
  few.kind = "uniformity";
  few.dmax = "zero";
  EXPECT_EQ(run(few), ntgof::cli::kInputError);
}

TEST_F(CliTest, PenaltyTableAndFixedBudget) {
  std::string table = "k,n,pi\n";
  for (int k = 1; k <= 3; ++k) table += std::to_string(k) + ",100," + std::to_string(3.0 * k) + "\n";
  RunConfig config;
  config.input = write("u.csv", uniform_csv(4, 100));
  config.penalty = "table:" + write("pen.csv", table).string();
  config.dmax = "3";
  config.replications = 200;
  std::string out;
  ASSERT_EQ(run(config, &out), 0);
  const auto report = Json::parse(out);
  EXPECT_EQ(report["dimension"].get<int>(), 3);
  EXPECT_DOUBLE_EQ(report["series"][2]["penalty"].get<double>(), 9.0);
}

TEST_F(CliTest, StudyCommands) {
  RunConfig config;
  config.command = Command::calibrate;
  config.input = write("study.json", R"({"n_grid": [50, 100]})");
  config.replications = 200;
  config.seed = 3;
  std::string out;
  ASSERT_EQ(run(config, &out), 0);
  auto doc = Json::parse(out);
  ASSERT_EQ(doc["results"].size(), 2u);
  EXPECT_EQ(doc["results"][1]["statistics"].size(), 200u);

  config.command = Command::power;
  config.input = write("power.json",
                       R"({"n_grid": [100, 400], "alternative": {"type": "contamination", "component": 2, "amplitude": 0.3}})");
  ASSERT_EQ(run(config, &out), 0);
  doc = Json::parse(out);
  EXPECT_GE(doc["points"][1]["rejection_rate"].get<double>(),
            doc["points"][0]["rejection_rate"].get<double>());

  config.command = Command::probe;
  config.input = write("tail.json", R"({"probe": "tail_rate", "n_grid": [16, 32, 64], "deviation": 0.5})");
  config.replications = 20000;
  ASSERT_EQ(run(config, &out), 0);
  EXPECT_TRUE(Json::parse(out)["passed"].get<bool>());

  config.input = write("broken.json", "{\"n\": ");
  EXPECT_EQ(run(config), ntgof::cli::kInputError);
}

TEST_F(CliTest, BinaryExitStatus) {
  const std::string cli = NTGOF_CLI_PATH;
  const auto empty = write("empty.csv", "");
  const auto good = write("u.csv", uniform_csv(6, 60));
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status(cli + " test --kind uniformity --input " + empty.string()), 2);
  EXPECT_EQ(status(cli + " test --kind uniformity --input " + good.string() +
                   " --penalty schwarz --alpha 0.05 --mc-reps 200 --seed 42"),
            0);
  EXPECT_EQ(status(cli + " test --unknown-flag"), 2);
}

}  // namespace
