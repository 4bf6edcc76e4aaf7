#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wmds/suites.hpp"

#ifndef WMDS_CLI_PATH
#error "WMDS_CLI_PATH must name the command-line binary"
#endif

using namespace wmds;
namespace fs = std::filesystem;

namespace {

// Per-test directory, so ctest -j runs do not share files.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wmds_cli_tests" /
                       ::testing::UnitTest::GetInstance()->current_test_info()->name();
  fs::create_directories(dir);
  fs::remove(dir / name);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Exit status of the CLI with `args`; `env` is prepended to the command line.
int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + std::string(WMDS_CLI_PATH) + "\" --quiet " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

nlohmann::json cli_json(const std::string& args, const std::string& env = "", int* status = nullptr) {
  const fs::path out = scratch("out.json");
  const int rc = cli("--out \"" + out.string() + "\" " + args, env);
  if (status) *status = rc;
  return nlohmann::json::parse(slurp(out));
}

}  // namespace

TEST(RunConfig, Validation) {
  EXPECT_NO_THROW(RunConfig{}.validate());
  RunConfig c;
  c.q = 17;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.eps = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.eps = 2;
  EXPECT_NO_THROW(c.validate());
  c = {};
  c.fit_deg = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.generator = 3;  // order 3 in F_13
  EXPECT_THROW(c.validate(), ConfigError);
  c.generator = 2;
  EXPECT_NO_THROW(c.validate());
  c = {};
  c.workers = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.n = 4;
  c.q = 17;  // phi(68) = 32
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, HashCoversResultsOnly) {
  RunConfig a, b;
  b.workers = 8;
  b.out = "x.json";
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  b.seed = 2;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Verify, MisconfigurationFailsBeforeComputing) {
  RunConfig c;
  c.q = 17;
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(verify(c, "all"), ConfigError);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
  EXPECT_THROW(verify(RunConfig{}, "lemma99"), ConfigError);
}

TEST(Verify, DocumentShape) {
  RunConfig c;
  c.samples = 2;
  auto j = verify(c, "relations");
  EXPECT_EQ(j["status"], "pass");
  EXPECT_EQ(j["config_hash"], c.hash());
  ASSERT_EQ(j["suites"].size(), 1u);
  const auto& r = j["suites"][0]["reports"][0];
  for (const char* k : {"identity", "configuration", "truncation", "status", "first_mismatch"}) EXPECT_TRUE(r.contains(k));
  EXPECT_EQ(verify(c, "relations").dump(), j.dump());
}

TEST(Cli, SingleValues) {
  auto h = cli_json("H t 1");
  auto g = cli_json("gauss 1 t 1");
  EXPECT_EQ(h["H"]["exact"], g["gauss"]["exact"]);
  EXPECT_EQ(cli_json("symbol t \"t - 2\"")["index"], 1);
  auto one = cli_json("gauss 1 1 1");
  EXPECT_EQ(CycNum::from_json(one["gauss"]["exact"]), CycNum::one(CycField::get(39)));
  EXPECT_EQ(one["gauss"]["approx"], "1 + 0i");
  EXPECT_TRUE(cli_json("symbol t t^2")["index"].is_null());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("--q 17 verify"), 2);
  EXPECT_EQ(cli("--q 17 --n 3 --suite all verify"), 2);
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("--suite nonsense verify"), 2);
  EXPECT_EQ(cli("gauss 1 \"2*t\""), 2);
  EXPECT_EQ(cli("H t \"t +* 1\""), 2);
  EXPECT_EQ(cli("--bogus 1 H t 1"), 2);
  EXPECT_EQ(cli("--help >/dev/null"), 0);
  EXPECT_EQ(cli("--out /dev/null --suite invariance --n 2 --q 17 verify"), 0);
  EXPECT_EQ(cli("--out /dev/null --suite relations --samples 2 verify"), 0);
}

TEST(Cli, ConfigPrecedence) {
  const fs::path cfg = scratch("run.cfg");
  std::ofstream(cfg) << "# comment\nn = 2\nq = 17\nseed = 9\n";
  auto prov = [](const nlohmann::json& j) { return j["provenance"]["run_config"]; };
  const std::string file = "--config \"" + cfg.string() + "\" ";
  auto a = prov(cli_json(file + "grid 0 0"));
  EXPECT_EQ(a["q"], 17);
  EXPECT_EQ(a["seed"], 9);
  // Config file over environment.
  EXPECT_EQ(prov(cli_json(file + "grid 0 0", "WMDS_Q=41"))["q"], 17);
  // Environment over defaults.
  EXPECT_EQ(prov(cli_json("grid 0 0", "WMDS_N=2 WMDS_Q=41"))["q"], 41);
  // Flags over everything.
  EXPECT_EQ(prov(cli_json(file + "--q 41 grid 0 0", "WMDS_Q=73"))["q"], 41);
  // The config file can come from the environment too.
  EXPECT_EQ(prov(cli_json("grid 0 0", "WMDS_CONFIG=\"" + cfg.string() + "\""))["n"], 2);
}

TEST(Cli, GridExportRoundTrip) {
  const fs::path out = scratch("grid.json");
  ASSERT_EQ(cli("--workers 2 --out \"" + out.string() + "\" grid 2 3"), 0);
  auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc["provenance"]["config_hash"], RunConfig{}.hash());
  EXPECT_EQ(doc["provenance"]["version"], version_string());
  HGrid g = HGrid::from_json(doc["grid"]);
  EXPECT_EQ(g.entry[0][0], CycNum::one(CycField::get(39)));
  EXPECT_EQ(g.entry[1][2], g.entry[2][1]);
  EXPECT_EQ(doc["refined"].size(), 9u);
  EXPECT_EQ(cli("--out /dev/null grid-check \"" + out.string() + "\""), 0);
  // A tampered cell breaks the transpose symmetry.
  doc["grid"]["entries"][2]["value"] = doc["grid"]["entries"][1]["value"];
  std::ofstream(out) << doc.dump();
  EXPECT_EQ(cli("--out /dev/null grid-check \"" + out.string() + "\""), 1);

  const fs::path csv = scratch("grid.csv");
  ASSERT_EQ(cli("--out \"" + csv.string() + "\" grid 1 1 --format csv"), 0);
  const std::string text = slurp(csv);
  EXPECT_EQ(text.rfind("# tool wmds ", 0), 0u);
  EXPECT_NE(text.find("# config_hash " + RunConfig{}.hash()), std::string::npos);
}

TEST(Cli, VerifyReportsAreByteIdentical) {
  const fs::path a = scratch("a.json"), b = scratch("b.json");
  ASSERT_EQ(cli("--suite lemma21 --out \"" + a.string() + "\" verify"), 0);
  ASSERT_EQ(cli("--suite lemma21 --workers 4 --out \"" + b.string() + "\" verify"), 0);
  EXPECT_EQ(slurp(a), slurp(b));
}
