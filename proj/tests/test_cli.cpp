#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(RENYI_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) v.push_back(json::parse(line));
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else cur += c;
  }
  out.push_back(cur);
  return out;
}

std::string config(const std::string& name) { return std::string(RENYI_CONFIGS) + "/" + name; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("renyi_cli_" + std::to_string(getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }
  fs::path dir_;
};

const char* kWitnessCheck =
    "check --theorem rrr --f exponential:rate=1 --g exponential:rate=2 --alpha 2 --beta 0 --no-timestamp";

}  // namespace

TEST(Cli, CheckWitnessExample) {
  const auto r = run(kWitnessCheck);
  ASSERT_EQ(r.code, 0);
  const auto lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_FALSE(lines[0]["header"].contains("timestamp"));
  EXPECT_LE(std::abs(lines[1]["gap"].get<double>()), 1e-8);
  EXPECT_EQ(lines[1]["theorem"], "rrr");
  EXPECT_EQ(lines[1]["direction"], "forward");
  EXPECT_EQ(lines[2]["summary"]["passes"], 1);
}

TEST(Cli, HeaderCarriesTimestampByDefault) {
  const auto lines = json_lines(run("check --theorem rrr --f exponential:rate=1 --g exponential:rate=2 --alpha 2 "
                                    "--beta 0 --seed 9").out);
  ASSERT_FALSE(lines.empty());
  EXPECT_TRUE(lines[0]["header"].contains("timestamp"));
  EXPECT_EQ(lines[0]["header"]["seed"], 9);
}

TEST(Cli, EvalUniformEntropyIsZero) {
  const auto r = run("eval --functional renyi_entropy --density uniform:lo=0,hi=1 --alpha 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 0.0, 1e-12);
}

TEST(Cli, WitnessFlagBuildsTightG) {
  const auto r = run("check --theorem escort --f exponential:rate=1 --alpha 2 --beta 0 --xi 2 --witness");
  ASSERT_EQ(r.code, 0);
  EXPECT_LE(std::abs(json_lines(r.out)[1]["gap"].get<double>()), 1e-7);
  // printed exponents leave a positive gap
  const auto p = run("check --theorem rrr --f exponential:rate=1 --alpha 2 --beta 0 --witness --paper-witness");
  ASSERT_EQ(p.code, 0);
  EXPECT_NEAR(json_lines(p.out)[1]["gap"].get<double>(), 0.446287, 1e-6);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("nosuch").code, 2);
  EXPECT_EQ(run("eval --functional nosuch --density exponential:rate=1").code, 2);
  EXPECT_EQ(run("check --theorem rrr --f exponential:rate= --g exponential:rate=2 --alpha 2 --beta 0").code, 2);
  EXPECT_EQ(run("check --theorem rrr --f exponential:rate=1 --g exponential:rate=2 --alpha 1 --beta 0").code, 2);
  EXPECT_EQ(run("check --theorem nosuch --f exponential:rate=1 --g exponential:rate=2 --alpha 2 --beta 0").code, 2);
  EXPECT_EQ(run("sweep --config /nonexistent/config.json").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, DivergentIntegralExitsThree) {
  // D_3[Exp(1)||Exp(2)] needs ∫ e^{-3x} e^{4x}
  EXPECT_EQ(run("check --theorem rrr --f exponential:rate=1 --g exponential:rate=2 --alpha 4 --beta 3").code, 3);
}

TEST(Cli, StrictTurnsNotesIntoFailures) {
  const std::string args =
      "check --theorem down_fisher --f exponential:rate=1 --g gen_gamma:a=2,d=1.2,p=1 --alpha 0.5 --beta 0.25 "
      "--a 0 --b 1 --xi 2";
  const auto loose = run(args);
  EXPECT_EQ(loose.code, 0);
  EXPECT_TRUE(json_lines(loose.out)[1].contains("notes"));
  EXPECT_EQ(run(args + " --strict").code, 3);
}

TEST_F(CliTest, MalformedGridExitsTwo) {
  const auto bad_axis =
      write("a.json", R"({"suites":[{"theorem":"rrr","f":"exponential:rate=1","g":"exponential:rate=2",
                          "alpha":{"from":1.2},"beta":0}]})");
  EXPECT_EQ(run("sweep --config " + bad_axis.string()).code, 2);
  const auto bad_key = write("b.json", R"({"suites":[{"theorem":"rrr","f":"exponential:rate=1",
                          "g":"exponential:rate=2","alpha":2,"beta":0,"gama":1}]})");
  EXPECT_EQ(run("sweep --config " + bad_key.string()).code, 2);
  const auto not_json = write("c.json", "{suites: [");
  EXPECT_EQ(run("sweep --config " + not_json.string()).code, 2);
  const auto huge = write("d.json", R"({"suites":[{"theorem":"rrr","f":"exponential:rate=1","g":"exponential:rate=2",
                          "alpha":{"from":1.1,"to":3,"count":2000},"beta":{"from":-1,"to":0.9,"count":1000}}]})");
  EXPECT_EQ(run("sweep --config " + huge.string()).code, 2);
}

TEST_F(CliTest, ShippedConfigsPass) {
  for (const auto& [name, rows] : {std::pair{"rrr_grid.json", 96}, std::pair{"escort_xi.json", 21},
                                   std::pair{"random.json", 450}}) {
    const auto r = run("sweep --no-timestamp --config " + config(name));
    EXPECT_EQ(r.code, 0) << name;
    const auto lines = json_lines(r.out);
    ASSERT_FALSE(lines.empty()) << name;
    const auto& s = lines.back()["summary"];
    EXPECT_EQ(s["n"], rows) << name;
    EXPECT_EQ(s["failures"], 0) << name;
    EXPECT_EQ(s["errors"], 0) << name;
    EXPECT_EQ(lines.size(), static_cast<std::size_t>(rows) + 2) << name;
  }
}

TEST_F(CliTest, SweepIsDeterministicAcrossRunsAndThreads) {
  const auto a = dir_ / "a.jsonl", b = dir_ / "b.jsonl";
  ASSERT_EQ(run("sweep --no-timestamp --threads 1 --config " + config("random.json") + " --out " + a.string()).code, 0);
  ASSERT_EQ(run("sweep --no-timestamp --threads 4 --config " + config("random.json") + " --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
}

TEST_F(CliTest, CsvAndJsonCarryIdenticalNumbers) {
  const auto j = json_lines(run("sweep --no-timestamp --config " + config("rrr_grid.json")).out);
  const auto csv = run("sweep --format csv --config " + config("rrr_grid.json")).out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto cols = split_csv(line);
  auto col = [&](const std::string& n) { return std::find(cols.begin(), cols.end(), n) - cols.begin(); };
  std::size_t i = 1;
  for (; std::getline(in, line); ++i) {
    ASSERT_LT(i + 1, j.size());
    const auto f = split_csv(line);
    for (const char* k : {"alpha", "beta", "gamma", "lhs", "rhs", "gap", "quad_error"})
      EXPECT_EQ(std::strtod(f[col(k)].c_str(), nullptr), j[i][k].get<double>()) << k << " row " << i;
    EXPECT_EQ(f[col("theorem")], j[i]["theorem"].get<std::string>());
    EXPECT_EQ(f[col("pass")], j[i]["pass"].get<bool>() ? "true" : "false");
  }
  EXPECT_EQ(i, j.size() - 1);
}

TEST_F(CliTest, WorstCaseReplaysBitForBit) {
  const auto report = dir_ / "r.jsonl";
  ASSERT_EQ(run("sweep --no-timestamp --config " + config("random.json") + " --out " + report.string()).code, 0);
  const auto lines = json_lines(slurp(report));
  const auto& s = lines.back()["summary"];
  ASSERT_TRUE(s.contains("worst_case"));
  const auto r = run("check --no-timestamp --replay " + report.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json_lines(r.out)[1]["gap"].get<double>(), s["worst_gap"].get<double>());
  // a bare instance object replays the same way
  const auto inst = write("i.json", s["worst_case"].dump());
  EXPECT_EQ(json_lines(run("check --replay " + inst.string()).out)[1]["gap"], s["worst_gap"]);
}

TEST(Cli, SharpnessRecoversExponentialWitness) {
  const auto r = run("sharpness --theorem rrr --f exponential:rate=1 --alpha 2 --beta 0 --family exponential "
                     "--start 0.7");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["best_params"][0].get<double>(), 2.0, 0.02);
  EXPECT_LE(j["best_gap"].get<double>(), 1e-6);
}

TEST(Cli, TransformTableAndSummary) {
  const auto t = run("transform --f exponential:rate=1 --kind down --a 1 --b 1 --nodes 256 --format csv");
  ASSERT_EQ(t.code, 0);
  std::istringstream in(t.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "y,x,density");
  const auto s = run("transform --f exponential:rate=1 --kind escort --xi 2 --alpha 1.5 --g exponential:rate=2 "
                     "--gamma 0.5");
  ASSERT_EQ(s.code, 0);
  const auto j = json::parse(s.out);
  EXPECT_NEAR(j["mass"].get<double>(), 1.0, 1e-6);
  EXPECT_LE(j["divergence"]["gap"].get<double>(), 1e-4);
  EXPECT_NEAR(j["renyi"]["closed"].get<double>(), 2.0 * std::log(2.0), 1e-10);
  EXPECT_EQ(run("transform --f gaussian:mu=0,sigma=1 --kind down --a 1 --b 1").code, 3);
}

TEST_F(CliTest, VerifyWithReducedSizes) {
  const auto cfg = write("acc.json", R"({"seed": 3, "acceptance": {"shannon_pairs": 5, "rrr_instances": 50,
      "transform_configs": 1, "sweep_points": 10, "identity_instances": 5, "discrete_instances": 1000}})");
  const auto r = run("verify --no-timestamp --config " + cfg.string());
  EXPECT_EQ(r.code, 0);
  const auto lines = json_lines(r.out);
  // criterion 10 compares two verify runs, so it lives in the acceptance binary
  ASSERT_EQ(lines.size(), 11u);
  for (std::size_t i = 1; i <= 9; ++i) {
    EXPECT_EQ(lines[i]["criterion"], static_cast<int>(i));
    EXPECT_TRUE(lines[i]["pass"].get<bool>()) << lines[i].dump();
  }
}
