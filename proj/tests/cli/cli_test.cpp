#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pgv/subprocess.hpp"

using namespace pgv;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = PGV_CLI;
const std::string kRoot = PGV_REPO_ROOT;
const std::string kFixtures = PGV_TEST_FIXTURES;

ProcessResult pgv(std::vector<std::string> args)
{
  args.insert(args.begin(), kCli);
  return run_process(args, "", std::chrono::minutes(5));
}

fs::path scratch(const std::string & name)
{
  fs::path d = fs::temp_directory_path() / "pgv_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

std::string project(const std::string & name) { return kRoot + "/projects/" + name; }

TEST(Cli, VerifyTwelveFails)
{
  fs::path out = scratch("t12");
  ProcessResult r = pgv({"verify", project("trainpass_t12.yaml"), "--out", out.string()});
  EXPECT_EQ(r.exit_code, 1) << r.out << r.err;
  json j = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(j["verdict"], "fail");
  const json & steps = j["trace"]["steps"];
  ASSERT_FALSE(steps.empty());
  EXPECT_EQ(steps.back()["time"], 16);
  EXPECT_EQ(steps.back()["state"]["passed"], "true");
  EXPECT_TRUE(fs::exists(out / "report.txt"));
  EXPECT_NE(r.out.find("counterexample"), std::string::npos);
}

TEST(Cli, VerifySixteenPasses)
{
  fs::path out = scratch("t16");
  ProcessResult r = pgv({"verify", project("trainpass_t16.yaml"), "--out", out.string()});
  EXPECT_EQ(r.exit_code, 0) << r.out << r.err;
  json j = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["bound"], 12);
  EXPECT_TRUE(j["contracts"].contains("ProcessQuery"));
}

TEST(Cli, ReportsAreReproducibleApartFromTiming)
{
  fs::path a = scratch("repro_a"), b = scratch("repro_b");
  ASSERT_EQ(pgv({"verify", project("trainpass_t12.yaml"), "--out", a.string()}).exit_code, 1);
  ASSERT_EQ(pgv({"verify", project("trainpass_t12.yaml"), "--out", b.string()}).exit_code, 1);
  json ja = json::parse(slurp(a / "report.json")), jb = json::parse(slurp(b / "report.json"));
  ja.erase("timing");
  jb.erase("timing");
  EXPECT_EQ(ja, jb);
  std::string ta = slurp(a / "report.txt"), tb = slurp(b / "report.txt");
  EXPECT_EQ(ta.substr(0, ta.find("\ntiming:")), tb.substr(0, tb.find("\ntiming:")));
}

TEST(Cli, BudgetExhaustionIsInconclusive)
{
  fs::path out = scratch("budget");
  ProcessResult r = pgv({"verify", project("trainpass_t12.yaml"), "--out", out.string(), "--max-cegar", "1"});
  EXPECT_EQ(r.exit_code, 2) << r.out << r.err;
  json j = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(j["verdict"], "inconclusive");
  EXPECT_NE(j["reason"].get<std::string>().find("CEGAR"), std::string::npos);
}

TEST(Cli, MissingVerifierIsInconclusive)
{
  if (find_program("kani")) {
    GTEST_SKIP() << "kani is installed";
  }
  fs::path out = scratch("polyglot");
  ProcessResult r = pgv({"verify", project("trainpass_polyglot.yaml"), "--out", out.string()});
  EXPECT_EQ(r.exit_code, 2) << r.out << r.err;
  EXPECT_NE(r.out.find("program not found"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrors)
{
  EXPECT_EQ(pgv({}).exit_code, 3);
  EXPECT_EQ(pgv({"verify"}).exit_code, 3);
  EXPECT_EQ(pgv({"verify", "/nonexistent.yaml"}).exit_code, 3);
  EXPECT_EQ(pgv({"verify", project("trainpass_t12.yaml"), "--bound", "0"}).exit_code, 3);
  EXPECT_EQ(pgv({"verify", project("trainpass_t12.yaml"), "--synth-oracle", "magic"}).exit_code, 3);
  EXPECT_EQ(pgv({"synth", project("trainpass_t12.yaml"), "Nope"}).exit_code, 3);
  EXPECT_EQ(pgv({"--version"}).exit_code, 0);
}

TEST(Cli, MissingSolverIsARuntimeError)
{
  fs::path out = scratch("nosolver");
  ProcessResult r = pgv({"verify", project("trainpass_t12.yaml"), "--out", out.string(), "--solver",
                         "/nonexistent/z3"});
  EXPECT_EQ(r.exit_code, 4) << r.out << r.err;
}

TEST(Cli, SynthWritesContract)
{
  fs::path out = scratch("synth");
  ProcessResult r = pgv({"synth", project("trainpass_t12.yaml"), "Waited", "--write", "--out", out.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("procedure: Waited"), std::string::npos);
  EXPECT_EQ(slurp(out / "Waited.contract.yaml"), r.out);
}

TEST(Cli, EmitHarnessMatchesGolden)
{
  fs::path out = scratch("emit");
  std::string model = kRoot + "/models/trainpass_polyglot.yaml";
  ProcessResult c = pgv({"emit-harness", model, "ProcessQuery", kFixtures + "/contracts/process_query.yaml",
                         "--out", out.string()});
  ASSERT_EQ(c.exit_code, 0) << c.err;
  EXPECT_EQ(slurp(out / "ProcessQuery_harness.c"), slurp(kFixtures + "/golden/ProcessQuery_harness.c"));
  ProcessResult k = pgv({"emit-harness", model, "Waited", kFixtures + "/contracts/waited.yaml", "--out",
                         out.string()});
  ASSERT_EQ(k.exit_code, 0) << k.err;
  EXPECT_EQ(slurp(out / "Waited_harness.rs"), slurp(kFixtures + "/golden/Waited_harness.rs"));
}

TEST(Cli, EmitHarnessRejectsMiniProcedures)
{
  ProcessResult r = pgv({"emit-harness", project("trainpass_t12.yaml"), "ProcessQuery",
                         kFixtures + "/contracts/process_query.yaml", "--out", scratch("emit_mini").string()});
  EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, SimulateIsSeededAndWithinSixteen)
{
  bool saw_sixteen = false;
  for (int seed = 0; seed < 40; ++seed) {
    ProcessResult r = pgv({"simulate", project("trainpass_t12.yaml"), "--steps", "12", "--json", "--seed",
                           std::to_string(seed)});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(pgv({"simulate", project("trainpass_t12.yaml"), "--steps", "12", "--json", "--seed",
                   std::to_string(seed)}).out,
              r.out);
    json t = json::parse(r.out);
    for (const auto & s : t["steps"]) {
      if (s["state"]["passed"] == "true") {
        EXPECT_LE(s["time"].get<int>(), 16);
        saw_sixteen = saw_sixteen || s["time"] == 16;
        break;
      }
    }
  }
  EXPECT_TRUE(saw_sixteen);
}

TEST(Cli, SimulateZeroStepsAndPolyglot)
{
  ProcessResult r = pgv({"simulate", project("trainpass_t12.yaml"), "--steps", "0", "--json"});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(json::parse(r.out)["steps"].size(), 1u);
  EXPECT_EQ(pgv({"simulate", kRoot + "/models/trainpass_polyglot.yaml"}).exit_code, 3);
}

}  // namespace
