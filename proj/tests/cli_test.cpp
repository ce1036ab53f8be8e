#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ehrelay/analytic.hpp"
#include "ehrelay/io/cli.hpp"
#include "ehrelay/io/csv.hpp"

namespace {

using namespace ehrelay;
namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("ehrelay_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result run(const std::string& args) {
  const auto err_path = scratch() / "stderr.txt";
  const std::string cmd = std::string(EHRELAY_CLI_PATH) + " " + args + " 2>" + err_path.string();
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  return r;
}

std::vector<io::CsvRow> rows_of(const std::string& csv) {
  std::istringstream in(csv);
  return io::parse_csv(in);
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

TEST(Cli, OutageUsesDefaults) {
  const auto r = run("outage --snr1-db 20 --theta 0.6 --relays 2 --mode no-interference");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(r.out);
  ASSERT_EQ(rows.size(), 1u);
  OperatingPoint op{2, 20.0, InterferenceMode::none, std::nullopt, std::nullopt, 0.6, 1.0, 5.0};
  EXPECT_EQ(*rows[0].analytic, analytic::evaluate(config_from_operating_point(op)).outage);
  EXPECT_EQ(rows[0].x, 0.6);
  EXPECT_FALSE(rows[0].montecarlo);
}

TEST(Cli, OutageWithMonteCarlo) {
  const auto r = run("outage --snr1-db 15 --relays 2 --mode fixed-inr --inr-db 5 --mc --trials 200000 --seed 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(r.out);
  ASSERT_TRUE(rows[0].montecarlo);
  EXPECT_LE(std::abs(*rows[0].montecarlo - *rows[0].analytic), std::max(3 * *rows[0].std_error, 1e-3));
}

TEST(Cli, ThetaOutOfRangeIsUsageError) {
  const auto r = run("outage --snr1-db 20 --theta 1.5");
  EXPECT_EQ(r.code, io::kExitUsage);
  EXPECT_NE(r.err.find("usage error"), std::string::npos);
}

TEST(Cli, UnknownCommandAndMissingCommand) {
  EXPECT_EQ(run("frobnicate").code, io::kExitUsage);
  EXPECT_EQ(run("").code, io::kExitUsage);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sweep-theta"), std::string::npos);
  EXPECT_EQ(run("sweep-snr --help").code, 0);
}

TEST(Cli, SweepThetaFromConfigFile) {
  const auto cfg = write_file("run.json", R"({"relays": 3, "snr1_db": 20, "mode": "no-interference"})");
  const auto r = run("sweep-theta --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(r.out);
  ASSERT_EQ(rows.size(), 49u);
  OperatingPoint op{3, 20.0, InterferenceMode::none, std::nullopt, std::nullopt, 0.5, 1.0, 5.0};
  auto c = config_from_operating_point(op);
  c.power_split = rows[10].x;
  EXPECT_EQ(*rows[10].analytic, analytic::evaluate(c).outage);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const auto cfg = write_file("override.json", R"({"relays": 3, "snr1_db": 20, "theta": 0.3})");
  const auto a = run("outage --config " + cfg.string() + " --relays 1 --theta 0.7");
  const auto b = run("outage --relays 1 --snr1-db 20 --theta 0.7");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ExitCodes) {
  // Contradictory mode and level: invalid input.
  EXPECT_EQ(run("outage --snr1-db 20 --mode no-interference --inr-db 3").code, io::kExitValidation);
  const auto bad = write_file("bad.json", "{\"relays\": ");
  EXPECT_EQ(run("outage --config " + bad.string()).code, io::kExitValidation);
  EXPECT_EQ(run("outage --config /nonexistent.json").code, io::kExitUsage);
  EXPECT_EQ(run("outage --snr1-db 20 -o /nonexistent/dir/out.csv").code, io::kExitIo);
  // A physical config is not an operating point, so sweep-snr rejects it.
  const auto phys = write_file("phys.json", R"({"source_power": 10})");
  EXPECT_EQ(run("sweep-snr --config " + phys.string()).code, io::kExitValidation);
}

TEST(Cli, NumericFailureMapsToExitFour) {
  // At 3000 dB the outage underflows to zero, so no slope exists.
  const auto r = run("diversity --snr1-db 20 --relays 2 --snr-lo-db 1000 --snr-hi-db 3000");
  EXPECT_EQ(r.code, io::kExitNumeric) << r.err;
  std::ostringstream out, err;
  const char* argv[] = {"ehrelay", "diversity", "--relays", "2", "--snr-lo-db", "1000", "--snr-hi-db", "3000"};
  EXPECT_EQ(io::main_entry(8, argv, out, err), io::kExitNumeric);
}

TEST(Cli, IdenticalRunsAreByteIdentical) {
  const std::string args = "sweep-snr --relays 2 --mode fixed-sir --sir-db 10 --mc --trials 100000 --seed 9 "
                           "--snr-min-db 0 --snr-max-db 20";
  const auto a = run(args + " --workers 1");
  const auto b = run(args + " --workers 4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(rows_of(a.out).size(), 5u);
}

TEST(Cli, WritesOutputAndPlot) {
  const auto csv = scratch() / "sweep.csv";
  const auto svg = scratch() / "sweep.svg";
  const auto r = run("sweep-theta --relays 2 --snr1-db 20 --theta-step 0.1 --theta-min 0.1 --theta-max 0.9 -o " +
                     csv.string() + " --plot " + svg.string() + " --log-y");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(rows_of(slurp(csv)).size(), 9u);
  EXPECT_NE(slurp(svg).find("<polyline"), std::string::npos);
}

TEST(Cli, OptimalThetaAndDiversity) {
  const auto r = run("optimal-theta --relays 2 --snr1-db 20");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(r.out);
  EXPECT_GE(rows[0].x, 0.5);
  EXPECT_LE(rows[0].x, 0.7);
  const auto d = run("diversity --relays 2 --snr1-db 20 --mode no-interference");
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_NE(d.err.find("diversity slope"), std::string::npos);
  EXPECT_EQ(rows_of(d.out).size(), 2u);
}

TEST(Cli, ValidateReportsPass) {
  const auto r = run("validate --relays 2 --snr1-db 20 --mode fixed-inr --inr-db 10 --trials 200000");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("PASS outage"), std::string::npos);
  EXPECT_EQ(run("validate --relays 2 --snr1-db 20 --trials 1000").code, io::kExitValidation);
}

}  // namespace
