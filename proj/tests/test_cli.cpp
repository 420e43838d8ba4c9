#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "regcomply/cli/commands.hpp"

using namespace regcomply;
using namespace regcomply::cli;
namespace fs = std::filesystem;

namespace {

RunConfig make(const std::string& command) {
  RunConfig c;
  c.command = command;
  return c;
}

struct Shell {
  int code;
  std::string out;
};

// Runs the built binary with `args`, capturing stdout.
Shell run_cli(const std::string& args) {
  const std::string cmd = std::string(REGCOMPLY_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path temp_dir() {
  const auto d = fs::temp_directory_path() / ("regcomply_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c = make("rip-suff");
  c.n = 6;
  c.k = 2;
  c.weights = "random:5:9";
  c.measure = "rip-suff";
  c.samples = 12345;
  c.seed = 77;
  c.trials = 13;
  c.max_L = 4;
  c.search.restarts = 5;
  c.search.tolerance = 1e-7;
  c.search.workers = 2;
  c.out = "x.json";
  c.format = "csv";
  c.oracle_check = true;
  const auto j = to_json(c);
  EXPECT_EQ(from_json(j), c);
  EXPECT_EQ(from_json(nlohmann::json::parse(j.dump())), c);
}

TEST(RunConfig, PartialMergeKeepsDefaults) {
  RunConfig c = make("mc");
  merge_json(c, nlohmann::json{{"n", 5}, {"search", {{"restarts", 3}}}});
  EXPECT_EQ(c.command, "mc");
  EXPECT_EQ(c.n, 5u);
  EXPECT_EQ(c.k, 1u);
  EXPECT_EQ(c.search.restarts, 3u);
  EXPECT_EQ(c.search.max_iters, SearchConfig{}.max_iters);
  EXPECT_THROW(merge_json(c, nlohmann::json{{"n", "three"}}), ConfigError);
  EXPECT_THROW(merge_json(c, nlohmann::json::array()), ConfigError);
}

TEST(RunConfig, Validation) {
  EXPECT_THROW(make("frobnicate").validate(), ConfigError);
  RunConfig c = make("mc");
  c.n = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = make("mc");
  c.format = "xml";
  EXPECT_THROW(c.validate(), ConfigError);
  c = make("mc");
  c.measure = "bogus";
  EXPECT_THROW(c.validate(), ConfigError);
  c = make("mc");
  c.search.tolerance = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(make("curves").validate());
}

TEST(Weights, Resolve) {
  RunConfig c = make("rip-suff");
  c.n = 3;
  c.weights = "2, 1, 1";
  const auto ws = resolve_weights(c);
  ASSERT_EQ(ws.size(), 1u);
  EXPECT_EQ(ws[0].vec(), (Vector{1, 0.5, 0.5}));
  c.weights = "random:4:1";
  EXPECT_EQ(resolve_weights(c).size(), 4u);
  c.weights = "1,x";
  EXPECT_THROW(resolve_weights(c), ConfigError);
  c.weights = "1,1";
  EXPECT_THROW(resolve_weights(c), DomainError);
  c.weights = "random:0:1";
  EXPECT_THROW(resolve_weights(c), ConfigError);
  c.weights = "random:3";
  EXPECT_THROW(resolve_weights(c), ConfigError);
}

TEST(Commands, Measure3dValues) {
  RunConfig c = make("measure3d");
  const auto o = run(c);
  const auto& r = o.result.at("runs").at(0);
  EXPECT_NEAR(r.at("area").get<double>(), 1.359347638, 1e-8);
  EXPECT_NEAR(r.at("published_formula_area").get<double>(), 1.000515344, 1e-8);
  EXPECT_NEAR(r.at("u").get<double>(), 0.350959312, 1e-8);
  EXPECT_NEAR(r.at("nu").get<double>(), 0.891826552, 1e-8);
  c.n = 4;
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Commands, RipSuffAndNec) {
  RunConfig c = make("rip-suff");
  c.n = 4;
  const auto s = run(c).result.at("runs").at(0);
  EXPECT_NEAR(s.at("delta").get<double>(), 1 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(s.at("D").get<double>(), 1.0, 1e-9);
  c.command = "rip-nec";
  const auto b = run(c).result.at("runs").at(0);
  EXPECT_NEAR(b.at("B").get<double>(), 0.2, 1e-9);
  EXPECT_NEAR(b.at("gamma").get<double>(), 6.0, 1e-8);
  c.k = 2;
  const auto inf = run(c).result.at("runs").at(0);
  EXPECT_EQ(inf.at("gamma"), "inf");
  EXPECT_EQ(parse_num(inf.at("gamma")), std::numeric_limits<double>::infinity());
}

TEST(Commands, Curves) {
  RunConfig c = make("curves");
  c.n = 6;
  c.k = 2;
  const auto o = run(c);
  const auto& rows = o.result.at("rows");
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_NEAR(rows.at(1).at("B_L").get<double>(), 0.2, 1e-15);
  EXPECT_NEAR(rows.at(0).at("D_L").get<double>(), 0.5, 1e-15);
  EXPECT_NEAR(o.result.at("profile_max").at("u").get<double>(), std::sqrt(2.0), 1e-6);
  EXPECT_EQ(o.table.rows.size(), 6u);
}

TEST(Commands, McIsDeterministic) {
  RunConfig c = make("mc");
  c.samples = 20000;
  c.seed = 4;
  c.measure = "mc-NU";
  const auto a = run(c), b = run(c);
  EXPECT_EQ(a.result, b.result);
  const auto& r = a.result.at("runs").at(0);
  EXPECT_NEAR(r.at("estimate").get<double>(), 0.891826552, 5 * r.at("std_error").get<double>());
}

TEST(Document, ReparsesAndDiffersOnlyInTimestamp) {
  RunConfig c = make("curves");
  const auto o = run(c);
  const auto t1 = render(c, o, "2026-01-01T00:00:00Z");
  const auto t2 = render(c, run(c), "2026-01-02T00:00:00Z");
  auto j1 = nlohmann::json::parse(t1), j2 = nlohmann::json::parse(t2);
  EXPECT_EQ(j1.at("tool"), "regcomply");
  EXPECT_EQ(j1.at("version"), kToolVersion);
  EXPECT_EQ(from_json(j1.at("config")), c);
  EXPECT_NE(j1.at("timestamp"), j2.at("timestamp"));
  j1.erase("timestamp");
  j2.erase("timestamp");
  EXPECT_EQ(j1, j2);
}

TEST(Document, Csv) {
  RunConfig c = make("curves");
  c.format = "csv";
  c.n = 2;
  const auto text = render(c, run(c), "t");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "L,u,B_L,D_L,gamma_L,delta_nec_L");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_cli("curves --n 3").code, 0);
  EXPECT_EQ(run_cli("curves --bogus-flag").code, 2);
  EXPECT_EQ(run_cli("mc --n 0").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
  EXPECT_EQ(run_cli("rip-suff --weights 1,2,x").code, 2);
  EXPECT_EQ(run_cli("--config /nonexistent/cfg.json").code, 2);
  EXPECT_EQ(run_cli("--version").code, 0);
}

TEST(Binary, WeightListSetsDimension) {
  const auto r = run_cli("rip-suff --weights 1,1,1,0.5");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("config").at("n"), 4);
  EXPECT_LT(j.at("result").at("runs").at(0).at("delta").get<double>(), 1 / std::sqrt(2.0));
}

TEST(Binary, ConfigFileAndAtomicOut) {
  const auto dir = temp_dir();
  const auto cfg = dir / "cfg.json";
  const auto out = dir / "out.json";
  std::ofstream(cfg) << R"({"command": "curves", "n": 4, "k": 2})";
  const auto r = run_cli("--config " + cfg.string() + " --n 5 --out " + out.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(out);
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j.at("config").at("n"), 5);
  EXPECT_EQ(j.at("config").at("k"), 2);
  EXPECT_EQ(j.at("result").at("rows").size(), 5u);
  for (const auto& e : fs::directory_iterator(dir))
    EXPECT_EQ(e.path().string().find(".tmp."), std::string::npos);
  // Unwritable target leaves no partial file and fails as a config error.
  EXPECT_EQ(run_cli("curves --out " + (dir / "missing" / "x.json").string()).code, 2);
  fs::remove_all(dir);
}
