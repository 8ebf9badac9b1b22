#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "solar/cli/commands.hpp"
#include "solar/data_pipeline.hpp"
#include "solar/errors.hpp"
#include "support/fixtures.hpp"

using namespace solar;
namespace fs = std::filesystem;
using nlohmann::json;
using solar::testing::read_file;

class Cli : public ::testing::Test {
 protected:
  fs::path dir = solar::testing::scratch_dir(
      std::string("cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::path desk = solar::testing::data_dir() / "desk.json";

  fs::path desk_with(const char* key, double value) {
    json cfg = json::parse(read_file(desk));
    cfg[key] = value;
    return solar::testing::write_file(dir / "variant.json", cfg.dump());
  }

  static std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> row;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) {
        row.push_back(cell);
      }
      rows.push_back(row);
    }
    return rows;
  }
};

TEST_F(Cli, SolveDesk) {
  ASSERT_EQ(cli::cmd_solve(desk, dir / "out.json"), 0);
  const json out = json::parse(read_file(dir / "out.json"));
  EXPECT_NEAR(out["capacities"]["srt"].get<double>(), 2.0, 1e-8);
  EXPECT_NEAR(out["capacities"]["prt"].get<double>(), 2.19089, 1e-5);
  EXPECT_NEAR(out["capacities"]["cb"].get<double>(), 2.27524, 1e-5);
  EXPECT_NEAR(out["capacities"]["opt"].get<double>(), 2.19089, 1e-5);
  EXPECT_TRUE(out["viability"]["viable"].get<bool>());
  EXPECT_NEAR(out["expansion"]["beta"].get<double>(), 0.04, 1e-9);
  EXPECT_EQ(out["flatness"]["max_delta"].get<double>(), 0.0);
}

TEST_F(Cli, SolveWithoutPremium) {
  ASSERT_EQ(cli::cmd_solve(solar::testing::data_dir() / "desk_no_premium.json", dir / "out.json"), 0);
  const json out = json::parse(read_file(dir / "out.json"));
  const double srt = out["capacities"]["srt"].get<double>();
  for (const char* m : {"prt", "cb", "opt"}) {
    EXPECT_NEAR(out["capacities"][m].get<double>(), srt, 1e-8) << m;
  }
}

TEST_F(Cli, SolveNotViable) {
  ASSERT_EQ(cli::cmd_solve(desk_with("pi0_usd_per_kw", 0.6), dir / "out.json"), 0);
  const json out = json::parse(read_file(dir / "out.json"));
  EXPECT_EQ(out["capacities"]["srt"].get<double>(), 0.0);
  EXPECT_FALSE(out["results"]["srt"]["viable"].get<bool>());
  EXPECT_FALSE(out["viability"]["viable"].get<bool>());
}

TEST_F(Cli, EpsilonSweep) {
  cli::SweepSpec spec;
  spec.values = {1.0, 0.0, 0.5};
  ASSERT_EQ(cli::cmd_sweep(desk, spec, dir / "sweep.csv"), 0);
  const auto rows = csv(read_file(dir / "sweep.csv"));
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0][0], "0");
  EXPECT_EQ(rows[0][1], "srt");
  EXPECT_EQ(rows[3][1], "opt");
  EXPECT_EQ(rows[11][0], "1");
  EXPECT_EQ(rows[6][2], "2.14324");
  double previous_gap = -1.0;
  for (std::size_t k = 0; k < rows.size(); k += 4) {
    const double gap = std::stod(rows[k + 2][2]) - std::stod(rows[k + 1][2]);
    EXPECT_GT(gap, previous_gap);
    previous_gap = gap;
  }
}

TEST_F(Cli, Pi0SweepPastThreshold) {
  cli::SweepSpec spec;
  spec.parameter = cli::SweepParameter::pi0;
  spec.values = {0.125, 0.4, 0.55, 0.7, 0.85};
  spec.mechanisms = {Mechanism::srt, Mechanism::prt, Mechanism::cb};
  const auto rows = cli::run_sweep(load_scenario(desk), spec);
  ASSERT_EQ(rows.size(), 15u);
  EXPECT_GT(rows[3].capacity, 0.0);  // srt at 0.4
  EXPECT_EQ(rows[6].capacity, 0.0);  // srt at 0.55
  EXPECT_GT(rows[7].capacity, 0.0);  // prt still in
  EXPECT_EQ(rows[13].capacity, 0.0);
  EXPECT_EQ(rows[14].capacity, 0.0);
}

TEST_F(Cli, SweepIsDeterministic) {
  cli::SweepSpec spec;
  spec.values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  ASSERT_EQ(cli::cmd_sweep(desk, spec, dir / "a.csv"), 0);
  ASSERT_EQ(cli::cmd_sweep(desk, spec, dir / "b.csv"), 0);
  EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
  ASSERT_EQ(cli::cmd_solve(desk, dir / "a.json"), 0);
  ASSERT_EQ(cli::cmd_solve(desk, dir / "b.json"), 0);
  EXPECT_EQ(read_file(dir / "a.json"), read_file(dir / "b.json"));
}

TEST_F(Cli, Verify) {
  for (Mechanism m : {Mechanism::srt, Mechanism::prt, Mechanism::cb}) {
    EXPECT_EQ(cli::cmd_verify(desk, m, 1000, 7, dir / "v.json"), 0) << to_string(m);
    EXPECT_TRUE(json::parse(read_file(dir / "v.json"))["passed"].get<bool>());
  }
  EXPECT_EQ(cli::cmd_verify(desk, Mechanism::prt, 1000, 7, dir / "v.json", 0.01), 1);
  EXPECT_FALSE(json::parse(read_file(dir / "v.json"))["passed"].get<bool>());
  EXPECT_THROW(cli::cmd_verify(desk, Mechanism::opt, 10, 7, dir / "v.json"), InvalidArgument);
}

TEST_F(Cli, ReportDesk) {
  ASSERT_EQ(cli::cmd_report(desk, dir / "report"), 0);
  for (const char* f : {"table_ii.csv", "ordering_report.csv", "ordering_report.json", "pi0_sweep.csv",
                        "report.json"}) {
    EXPECT_TRUE(fs::exists(dir / "report" / f)) << f;
  }
  const auto table = csv(read_file(dir / "report" / "table_ii.csv"));
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0], (std::vector<std::string>{"1", "2", "2.19089", "2.19089", "2.27524"}));
  EXPECT_EQ(table[1], (std::vector<std::string>{"0", "2", "2", "2", "2"}));
  const json summary = json::parse(read_file(dir / "report" / "report.json"));
  EXPECT_TRUE(summary["table_pattern"].get<bool>());
  EXPECT_TRUE(summary["pi0_sweep"]["srt_exits_first"].get<bool>());
}

TEST(CliParsing, Values) {
  EXPECT_EQ(cli::parse_values("0,0.5,1"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_THROW(cli::parse_values("0,,1"), InvalidArgument);
  EXPECT_THROW(cli::parse_values("a"), InvalidArgument);
  EXPECT_THROW(cli::parse_sweep_parameter("load"), InvalidArgument);
  cli::SweepSpec spec;
  spec.values = {-1.0};
  EXPECT_THROW(cli::run_sweep(solar::testing::desk(), spec), InvalidArgument);
}

TEST_F(Cli, DashWritesToStdout) {
  cli::SweepSpec spec;
  spec.values = {0.0};
  spec.mechanisms = {Mechanism::srt};
  ::testing::internal::CaptureStdout();
  ASSERT_EQ(cli::cmd_sweep(desk, spec, "-"), 0);
  EXPECT_EQ(::testing::internal::GetCapturedStdout(), "value,mechanism,capacity,residual\n0,srt,2,0\n");
}
