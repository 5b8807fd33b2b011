#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "deepens/cli.hpp"

using namespace deepens;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status = 0;
  std::string out, err;
};

Run run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"deepens"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int status = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "deepens_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path small_config() {
  const auto path = scratch("small.cfg");
  std::ofstream(path) << "synthetic_d = 3\nsynthetic_count = 500\ncopies = 4\nunit_epochs = 40\n"
                         "combiner_epochs = 40\nseed = 12\n";
  return path;
}

}  // namespace

TEST(Cli, Bounds) {
  const auto r = run({"bounds", "--n", "50", "--eps", "0.3"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["hoeffding"].get<double>(), std::exp(-4.0), 1e-9);
  EXPECT_NEAR(j["hoeffding"].get<double>(), 0.018316, 5e-7);
  EXPECT_NEAR(j["exact_tail"].get<double>(), exact_error_tail(50, 0.3), 1e-15);
  EXPECT_FALSE(j.contains("monte_carlo"));
}

TEST(Cli, BoundsWithSimulationIsSeeded) {
  const auto a = run({"bounds", "--n", "5", "--eps", "0.2", "--trials", "20000", "--seed", "4"});
  const auto b = run({"bounds", "--n", "5", "--eps", "0.2", "--trials", "20000", "--seed", "4"});
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(a.out)["monte_carlo"]["trials"], 20000);
}

TEST(Cli, Counts) {
  const auto r = run({"counts", "--d", "10"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto row = json::parse(r.out)["rows"][0];
  EXPECT_EQ(row["shallow_units"], 1024);
  EXPECT_EQ(row["deep_units"], 36);
}

TEST(Cli, CountsDefaultRange) {
  const auto rows = json::parse(run({"counts"}).out)["rows"];
  ASSERT_EQ(rows.size(), 9U);
  EXPECT_EQ(rows[0]["d"], 2);
  EXPECT_EQ(rows[8]["d"], 10);
}

TEST(Cli, ApproxDeepBalanced) {
  const auto r = run({"approx", "--d", "8", "--topology", "balanced", "--lambda", "0.05"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["units"], 28);
  EXPECT_EQ(j["layers_including_leaves"], 4);
  EXPECT_EQ(j["ensemble_layers"], 3);
  EXPECT_NEAR(j["sweep"][0]["sup_cube_error"].get<double>(), 0.007883897393, 1e-8);
}

TEST(Cli, ApproxShallowSweepDecreases) {
  const auto r = run({"approx", "--d", "3"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto sweep = json::parse(r.out)["sweep"];
  ASSERT_EQ(sweep.size(), 4U);
  for (std::size_t i = 1; i < sweep.size(); ++i)
    EXPECT_LT(sweep[i]["sup_cube_error"].get<double>(), sweep[i - 1]["sup_cube_error"].get<double>());
}

TEST(Cli, Probe) {
  const auto r = run({"probe", "--w", "1", "--x", "2", "--lambda", "1", "10", "100"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["case"], "positive-half-space");
  EXPECT_EQ(j["limit"], 1.0);
  EXPECT_EQ(j["trace"].size(), 3U);
  const auto plane = json::parse(run({"probe", "--w", "1", "-1", "--x", "1", "1", "--phi", "0.3"}).out);
  EXPECT_EQ(plane["case"], "hyperplane");
  EXPECT_NEAR(plane["limit"].get<double>(), 1.0 / (1.0 + std::exp(-0.3)), 1e-15);
  EXPECT_EQ(run({"probe", "--w", "1", "--x", "1", "2"}).status, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  for (auto args : {std::initializer_list<const char*>{"frobnicate"},
                    std::initializer_list<const char*>{"counts", "--bogus"},
                    std::initializer_list<const char*>{"bounds", "--n", "abc", "--eps", "0.1"},
                    std::initializer_list<const char*>{}}) {
    const auto r = run(args);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
  }
}

TEST(Cli, DomainErrorsExitOne) {
  const auto r = run({"bounds", "--n", "10", "--eps", "0.7"});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("epsilon"), std::string::npos) << r.err;
  const auto degenerate = run({"approx", "--d", "4", "--kind", "logistic", "--bias", "0"});
  EXPECT_EQ(degenerate.status, 1);
  EXPECT_EQ(run({"counts", "--d", "1"}).status, 1);
}

TEST(Cli, OutFlagWritesFile) {
  const auto path = scratch("counts.json");
  fs::remove(path);
  const auto r = run({"counts", "--d", "4", "--out", path.c_str()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(read_file(path))["rows"][0]["deep_units"], 12);
  EXPECT_EQ(run({"counts", "--out", "/nonexistent_dir/y/z.json"}).status, 1);
}

TEST(Cli, ExperimentDeterministic) {
  const auto cfg = small_config();
  const auto a = run({"experiment", "--config", cfg.c_str()});
  const auto b = run({"experiment", "--config", cfg.c_str()});
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(a.out)["metadata"]["seed"], 12);
  const auto c = run({"experiment", "--config", cfg.c_str(), "--seed", "13"});
  EXPECT_EQ(json::parse(c.out)["metadata"]["seed"], 13);
}

TEST(Cli, ExperimentCsvToFile) {
  const auto cfg = small_config();
  const auto path = scratch("report.csv");
  const auto r = run({"experiment", "--config", cfg.c_str(), "--format", "csv", "--out", path.c_str()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto text = read_file(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(parse_report_csv(text).methods.size(), 3U);
}

TEST(Cli, ExperimentMissingConfig) {
  EXPECT_EQ(run({"experiment", "--config", "/nonexistent.cfg"}).status, 1);
  EXPECT_EQ(run({"experiment"}).status, 2);
}
