#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "darwinism/qcb.hpp"
#include "darwinism/report.hpp"

namespace darwinism::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("darwinism_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CliRedundancy, WorkedExample) {
  const auto r = call({"redundancy", "--n-good", "2", "--n-bad", "4", "--gamma2-good", "0",
                       "--gamma2-bad", "1", "--delta", "0.1"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["f_delta"], 4);
  EXPECT_DOUBLE_EQ(j["r_avg"].get<double>(), 1.5);
  EXPECT_DOUBLE_EQ(j["r_max_discrete"].get<double>(), 2.0);
  for (const char* key : {"r_max_continuous", "r_qcb", "r_qcb_expanded", "ratio_avg_over_max"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["validity_flags"].is_array());
}

TEST(CliRedundancy, NumbersComeFromLibrary) {
  const auto r = call({"redundancy", "--n-good", "50", "--n-bad", "50", "--gamma2-good", "0.2"});
  ASSERT_EQ(r.code, kSuccess);
  const auto j = Json::parse(r.out);
  const auto lib = full_redundancy_report({50, 50, 0.2, 1.0, 0.5}, DeficitSpec(0.1));
  EXPECT_EQ(j["r_qcb"].get<double>(), *lib.r_qcb);
  EXPECT_EQ(j["r_max_continuous"].get<double>(), *lib.r_max_continuous);
  EXPECT_EQ(j["validity_flags"], Json::array({"qcb_valid", "max_formula_valid"}));
}

TEST(CliRedundancy, TrivialDeficit) {
  const auto r = call({"redundancy", "--delta", "1"});
  ASSERT_EQ(r.code, kSuccess);
  EXPECT_DOUBLE_EQ(Json::parse(r.out)["r_avg"].get<double>(), 6.0);
}

TEST(CliRedundancy, Unreachable) {
  const auto r = call({"redundancy", "--n-good", "0", "--delta", "0.5"});
  EXPECT_EQ(r.code, kDeficitUnreachable);
  EXPECT_EQ(Json::parse(r.err)["error"], "deficit_unreachable");
}

TEST(CliRedundancy, InputErrors) {
  auto r = call({"redundancy", "--gamma2-good", "1.5"});
  EXPECT_EQ(r.code, kInputError);
  const auto j = Json::parse(r.err);
  EXPECT_EQ(j["error"], "invalid_spec");
  EXPECT_EQ(j["violations"][0], "overlap out of range");
  EXPECT_EQ(call({"redundancy", "--delta", "0"}).code, kInputError);
  EXPECT_EQ(call({"redundancy", "--n-good", "two"}).code, kInputError);
  EXPECT_EQ(call({"redundancy", "--format", "xml"}).code, kInputError);
  EXPECT_EQ(call({}).code, kInputError);
}

TEST(CliCurve, HeaderAndRows) {
  const auto r = call({"curve"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 8u);
  EXPECT_EQ(lines[0], "fragment_size,avg_holevo_bits,avg_mi_bits,qcb_holevo_bits,method,stderr");
  EXPECT_EQ(lines[3], "2,0.6,,0.00892394016178,exact,");
  EXPECT_EQ(split(lines[7])[1], "1");
}

TEST(CliCurve, MonteCarloIsByteIdentical) {
  const std::vector<std::string> args = {"curve", "--method", "monte-carlo", "--samples",
                                         "100000", "--seed", "7"};
  const auto a = call(args);
  const auto b = call(args);
  ASSERT_EQ(a.code, kSuccess);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, call({"curve", "--method", "monte-carlo", "--samples", "100000", "--seed", "8"}).out);
}

TEST(CliCurve, OracleFillsMutualInformation) {
  const auto r = call({"curve", "--method", "oracle", "--fmin", "1", "--fmax", "2"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 3u);
  const auto row = split(lines[2]);
  EXPECT_EQ(row[4], "oracle");
  EXPECT_NEAR(std::stod(row[1]), 0.6, 1e-10);
  EXPECT_FALSE(row[2].empty());
}

TEST(CliCurve, QcbAndJson) {
  const auto r = call({"curve", "--method", "qcb", "--format", "json", "--fmax", "2"});
  ASSERT_EQ(r.code, kSuccess);
  const auto j = Json::parse(r.out);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[1]["method"], "qcb-asymptotic");
  EXPECT_TRUE(j[1]["avg_mi_bits"].is_null());
}

TEST(CliCurve, RangeErrors) {
  EXPECT_EQ(call({"curve", "--fmax", "7"}).code, kInputError);
  EXPECT_EQ(call({"curve", "--fmin", "3", "--fmax", "2"}).code, kInputError);
  EXPECT_EQ(call({"curve", "--method", "guess"}).code, kInputError);
  EXPECT_EQ(call({"curve", "--method", "oracle", "--n-bad", "40"}).code, kInputError);
}

TEST(CliValidate, DefaultPasses) {
  const auto r = call({"validate"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  for (const auto& c : j["checks"]) EXPECT_LT(c["max_deviation"].get<double>(), 1e-10);
}

TEST(CliValidate, CorruptedCheckFails) {
  const auto r = call({"validate", "--corrupt-check", "holevo_bound"});
  EXPECT_EQ(r.code, kValidationFailed);
  EXPECT_NE(r.err.find("validation failed: holevo_bound"), std::string::npos);
  EXPECT_EQ(call({"validate", "--corrupt-check", "nope"}).code, kInputError);
}

TEST(CliValidate, TwelveSpinsWithinBudget) {
  const auto start = std::chrono::steady_clock::now();
  const auto r = call({"validate", "--n-good", "2", "--n-bad", "10"});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(r.code, kSuccess) << r.err;
  EXPECT_LT(seconds, 60.0);
}

TEST(CliValidate, CapExceeded) {
  EXPECT_EQ(call({"validate", "--n-bad", "20"}).code, kInputError);
}

TEST(CliConfig, CommandLineBeatsFileBeatsDefault) {
  TempDir dir;
  const auto cfg = dir.file("run.ini");
  std::ofstream(cfg) << "n-good = 3\ndelta = 0.5\n";
  const auto r = call({"redundancy", "--config", cfg, "--delta", "0.1"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["n_good"], 3);
  EXPECT_EQ(j["n_bad"], 4);
  EXPECT_DOUBLE_EQ(j["delta"].get<double>(), 0.1);
  EXPECT_EQ(call({"redundancy", "--config", dir.file("missing.ini")}).code, kInputError);
}

TEST(CliOutput, WritesFile) {
  TempDir dir;
  const auto path = dir.file("curve.csv");
  const auto r = call({"curve", "--out", path});
  ASSERT_EQ(r.code, kSuccess);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path), call({"curve"}).out);
}

TEST(CliSweep, GridOrderAndColumns) {
  const auto r = call({"sweep", "--n-bad-grid", "10,20", "--gamma2-good-grid", "0,0.5",
                       "--delta-grid", "0.1,0.2"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 9u);
  const auto header = split(lines[0]);
  EXPECT_EQ(header[1], "n_bad");
  EXPECT_EQ(split(lines[1])[1], "10");
  EXPECT_EQ(split(lines[1])[5], "0.1");
  EXPECT_EQ(split(lines[2])[5], "0.2");
  EXPECT_EQ(split(lines[3])[2], "0.5");
  EXPECT_EQ(split(lines[5])[1], "20");
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(split(lines[i]).size(), header.size());
}

TEST(CliSweep, ResumeAppendsOnlyMissingRows) {
  TempDir dir;
  const auto path = dir.file("sweep.csv");
  ASSERT_EQ(call({"sweep", "--n-bad-grid", "10", "--out", path}).code, kSuccess);
  const auto first = slurp(path);
  ASSERT_EQ(call({"sweep", "--n-bad-grid", "10,20", "--out", path}).code, kSuccess);
  ASSERT_EQ(call({"sweep", "--n-bad-grid", "10,20", "--out", path}).code, kSuccess);
  const auto lines = lines_of(slurp(path));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(slurp(path).substr(0, first.size()), first);
  EXPECT_EQ(lines, lines_of(call({"sweep", "--n-bad-grid", "10,20"}).out));
}

TEST(CliSweep, RefusesForeignFile) {
  TempDir dir;
  const auto path = dir.file("other.csv");
  std::ofstream(path) << "a,b,c\n1,2,3\n";
  EXPECT_EQ(call({"sweep", "--out", path}).code, kInputError);
}

TEST(CliSweep, MalformedGrid) {
  EXPECT_EQ(call({"sweep", "--n-bad-grid", "10,x"}).code, kInputError);
  EXPECT_EQ(call({"sweep", "--n-bad-grid", "2.5"}).code, kInputError);
  EXPECT_EQ(call({"sweep", "--gamma2-good-grid", "1.2"}).code, kInputError);
  EXPECT_EQ(call({"sweep", "--delta-grid", "0"}).code, kInputError);
}

TEST(CliSweep, UnreachableRowsAreKept) {
  const auto r = call({"sweep", "--n-good", "0", "--n-bad-grid", "5", "--delta-grid", "0.5,1"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(split(lines[1])[6], "deficit_unreachable");
  EXPECT_EQ(split(lines[2])[6], "ok");
}

TEST(CliSweep, NormalisedRedundancyDecreasesWithPool) {
  // Falls monotonically, but towards 1.3153 rather than 1 (see the README).
  const auto r = call({"sweep", "--n-good", "4", "--n-bad-grid", "100,1000,10000"});
  ASSERT_EQ(r.code, kSuccess);
  const auto lines = lines_of(r.out);
  const auto header = split(lines[0]);
  const auto col = std::find(header.begin(), header.end(), "normalized_r_avg") - header.begin();
  double previous = INFINITY;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double v = std::stod(split(lines[i])[col]);
    EXPECT_LT(v, previous);
    previous = v;
  }
  EXPECT_NEAR(previous, 1.3154, 1e-3);
}

TEST(CliSweep, DefinitionRatioColumn) {
  std::string grid;
  for (int i = 10; i <= 99; ++i) grid += (grid.empty() ? "" : ",") + std::to_string(i / 100.0);
  const auto r = call({"sweep", "--gamma2-good-grid", grid, "--delta", "0.1"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto lines = lines_of(r.out);
  const auto header = split(lines[0]);
  const auto col = std::find(header.begin(), header.end(), "definition_ratio") - header.begin();
  double previous = 0.0;
  double minimum = INFINITY;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double v = std::stod(split(lines[i])[col]);
    EXPECT_GT(v, previous);
    minimum = std::min(minimum, v);
    previous = v;
  }
  EXPECT_NEAR(minimum, 0.9 / std::log(10.0), 1e-6);
  EXPECT_LT(previous, 1.0);
}

}  // namespace
}  // namespace darwinism::cli
