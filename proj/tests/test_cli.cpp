#include "tra/cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace tra;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tra_cli");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#')
      lines.push_back(line);
  return lines;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tra_cli_test_" + name);
}

} // namespace

TEST(CliParsers, Grids) {
  const auto g = cli::parse_line_grid("0:2:5");
  const auto v = g.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v[4], 2.0);
  const auto s = cli::parse_scan_grid("3x7");
  EXPECT_EQ(s.nb, 3);
  EXPECT_EQ(s.nc, 7);
  EXPECT_THROW(cli::parse_line_grid("0:2"), cli::UsageError);
  EXPECT_THROW(cli::parse_scan_grid("3y7"), cli::UsageError);
  EXPECT_THROW(cli::parse_real("abc", "x"), cli::UsageError);
  EXPECT_THROW(cli::parse_positive_int("0", "x"), cli::UsageError);
  EXPECT_EQ(cli::parse_list("1,2.5,-3", "x"), (std::vector<double>{1.0, 2.5, -3.0}));
}

TEST(Cli, SpectrumCsvHasFiveBoundStates) {
  const auto r = run_cli({"spectrum", "--model", "I", "--method", "hmd"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "method,k,energy");
  EXPECT_NE(lines[1].find("-26.926911531"), std::string::npos);
}

TEST(Cli, SpectrumBothMethodsJson) {
  const auto r = run_cli({"spectrum", "--method", "both", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["rows"].size(), 10u);
  EXPECT_EQ(j["columns"][2], "energy");
}

TEST(Cli, SpdScanDefaultGrid) {
  const auto r = run_cli({"spd-scan", "--model", "II"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  EXPECT_EQ(lines.size(), 2501u);
  EXPECT_EQ(lines[0], "B_over_A,C_over_A,label,positive_roots,exotic,v_min");
}

TEST(Cli, PotentialCurveMultipleColumns) {
  const auto r = run_cli({"potential-curve", "--B-over-A", "1,100", "--C-over-A", "2",
                          "--grid", "0.1:5:50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 51u);
  EXPECT_EQ(std::count(lines[0].begin(), lines[0].end(), ','), 2);
}

TEST(Cli, WavefunctionColumns) {
  const auto r = run_cli({"wavefunction", "--grid", "0:20:200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 201u);
  EXPECT_NE(lines[0].find("psi0_tra"), std::string::npos);
  EXPECT_NE(lines[0].find("psi4_hmd"), std::string::npos);
}

TEST(Cli, CompareMatchesFixture) {
  const auto r = run_cli({"compare", "--model", "I"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# fixture_result: pass"), std::string::npos);
}

TEST(Cli, CompareFixtureMismatchExitCode) {
  const auto r = run_cli({"compare", "--model", "I", "--hmd-M", "10"});
  EXPECT_EQ(r.code, cli::FixtureMismatch);
  EXPECT_NE(r.out.find("fail"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, cli::Usage);
  EXPECT_EQ(run_cli({"bogus"}).code, cli::Usage);
  EXPECT_EQ(run_cli({"spectrum", "--model", "III"}).code, cli::Usage);
  EXPECT_EQ(run_cli({"spectrum", "--method", "lmm", "--lmm-M", "1"}).code, cli::Usage);
  EXPECT_EQ(run_cli({"spectrum", "--no-such-flag"}).code, cli::Usage);
  EXPECT_EQ(run_cli({"spectrum", "--config", "/nonexistent/cfg.json"}).code, cli::Usage);
}

TEST(Cli, NumericalFailureExitCode) {
  // A coupling this large overflows the Hamiltonian.
  const auto r = run_cli({"spectrum", "--A", "1e300"});
  EXPECT_EQ(r.code, cli::Numerical) << r.err;
  EXPECT_NE(r.err.find("numerical failure"), std::string::npos);
}

TEST(Cli, ConfigRoundTripIsByteIdentical) {
  const auto cfg = temp_path("cfg.json");
  const auto out1 = temp_path("out1.csv");
  const auto out2 = temp_path("out2.csv");
  auto r = run_cli({"spectrum", "--model", "II", "--method", "both", "--lmm-M", "400", "--h",
                    "0.006", "--save-config", cfg.string(), "--out", out1.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  // The saved config names out1; override it so both files can be compared.
  r = run_cli({"--config", cfg.string(), "--out", out2.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = slurp(out1);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(out2));
  const auto j = nlohmann::json::parse(slurp(cfg));
  EXPECT_EQ(j["model"], "II");
  EXPECT_EQ(j["lmm-M"], 400);
  std::filesystem::remove(cfg);
  std::filesystem::remove(out1);
  std::filesystem::remove(out2);
}

TEST(Cli, ConfigRejectsUnknownKeys) {
  const auto cfg = temp_path("bad.json");
  std::ofstream(cfg) << R"({"command": "spectrum", "colour": 3})";
  EXPECT_EQ(run_cli({"--config", cfg.string()}).code, cli::Usage);
  std::filesystem::remove(cfg);
}

TEST(CliBinary, VersionAndHelp) {
  const std::string bin = TRA_CLI_PATH;
  const auto out = temp_path("version.txt");
  const std::string cmd = "\"" + bin + "\" --version > \"" + out.string() + "\"";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(out), std::string(cli::version) + "\n");
  const std::string bad = "\"" + bin + "\" bogus 2> /dev/null";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), cli::Usage);
  std::filesystem::remove(out);
}
