#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "pgv/project.hpp"

using namespace pgv;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = PGV_REPO_ROOT;
const std::string kFixtures = PGV_TEST_FIXTURES;

fs::path write_project(const std::string & name, const std::string & body)
{
  fs::path dir = fs::temp_directory_path() / "pgv_project_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p) << "model: " << kRoot << "/models/trainpass.yaml\n" << body;
  return p;
}

std::string load_error(const fs::path & p)
{
  try {
    load_project(p);
  } catch (const ModelError & e) {
    return e.what();
  }
  return "";
}

TEST(Project, TrainPassTwelve)
{
  Project p = load_project(kRoot + "/projects/trainpass_t12.yaml");
  EXPECT_EQ(p.bound, 12u);
  EXPECT_EQ(p.max_cegis, 20u);
  EXPECT_EQ(p.max_cegar, 50u);
  EXPECT_EQ(p.synth, SynthKind::Enum);
  EXPECT_EQ(p.unknown_policy, UnknownPolicy::Abort);
  EXPECT_EQ(p.property.kind, PropertyKind::EventuallyWithin);
  EXPECT_EQ(p.property.within, 12u);
  EXPECT_EQ(p.output, fs::path(kRoot + "/pgv-out/trainpass_t12"));
  EXPECT_EQ(p.model.model.procedures.size(), 5u);
}

TEST(Project, BareModelFileUsesItsProperty)
{
  fs::path dir = fs::temp_directory_path() / "pgv_project_test";
  fs::create_directories(dir);
  fs::path m = dir / "bare.yaml";
  fs::copy_file(kRoot + "/models/trainpass.yaml", m, fs::copy_options::overwrite_existing);
  Project p = load_project(m);
  EXPECT_TRUE(p.file.empty());
  EXPECT_EQ(p.property.within, 12u);
}

TEST(Project, Overrides)
{
  fs::path p = write_project("full.yaml", R"(property:
  kind: invariant
  predicate: "true"
bound: 5
budgets: {max_cegis: 3, max_cegar: 4}
synthesis:
  oracle: enum
  concurrent: true
verification:
  unknown_policy: treat-as-fail
  mini: {max_bits: 12}
  cbmc: {path: /opt/cbmc, args: ["--unwind", "4"], timeout_s: 7}
solver: {path: z3, timeout_s: 2}
output: out
seed: 42
)");
  Project q = load_project(p);
  EXPECT_EQ(q.bound, 5u);
  EXPECT_EQ(q.max_cegis, 3u);
  EXPECT_EQ(q.max_cegar, 4u);
  EXPECT_TRUE(q.concurrent_synthesis);
  EXPECT_EQ(q.unknown_policy, UnknownPolicy::TreatAsFail);
  EXPECT_EQ(q.mini_max_bits, 12u);
  EXPECT_EQ(q.cbmc.path, "/opt/cbmc");
  EXPECT_EQ(q.cbmc.args, (std::vector<std::string>{"--unwind", "4"}));
  EXPECT_EQ(q.cbmc.timeout, std::chrono::seconds(7));
  EXPECT_EQ(q.seed, 42u);
  EXPECT_EQ(q.output, p.parent_path() / "out");
  EngineConfig cfg = engine_config(q);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.bound, 5u);
  RunMetadata md = project_metadata(q);
  EXPECT_EQ(md.at("seed"), "42");
}

TEST(Project, SecretsAreRejected)
{
  for (const char * body : {"synthesis:\n  oracle: llm\n  llm:\n    api_key: sk-abc\n",
                            "synthesis:\n  llm:\n    token: abc\n",
                            "api_key: sk-abc\n",
                            "verification:\n  cbmc:\n    secret: x\n"}) {
    std::string text = std::string("property:\n  kind: invariant\n  predicate: \"true\"\n") + body;
    std::string err = load_error(write_project("secret.yaml", text));
    EXPECT_NE(err.find("PGV_LLM_API_KEY"), std::string::npos) << body << " -> " << err;
  }
}

TEST(Project, SchemaErrors)
{
  const std::string prop = "property:\n  kind: invariant\n  predicate: \"true\"\n";
  EXPECT_EQ(load_error(write_project("ok.yaml", prop)), "");
  EXPECT_NE(load_error(write_project("e1.yaml", prop + "bogus: 1\n")), "");
  EXPECT_NE(load_error(write_project("e2.yaml", prop + "bound: -3\n")), "");
  EXPECT_NE(load_error(write_project("e3.yaml", prop + "synthesis:\n  oracle: oracle9\n")), "");
  EXPECT_NE(load_error(write_project("e4.yaml", prop + "synthesis:\n  oracle: scripted\n")), "");
  EXPECT_NE(load_error(write_project("e5.yaml", "property:\n  kind: invariant\n  predicate: \"nosuch\"\n")), "");
  EXPECT_NE(load_error(write_project("e6.yaml", prop + "verification:\n  unknown_policy: maybe\n")), "");
  EXPECT_THROW(load_project("/nonexistent/project.yaml"), ModelError);
}

TEST(Project, ContractFiles)
{
  ContextPtr ctx = make_context({{"req", SemType::uint(8)}, {"resp", SemType::boolean()}});
  Contract c = load_contract_file(kFixtures + "/contracts/process_query_q1.yaml", *ctx);
  EXPECT_EQ(pretty_print(c.pre), "true");
  fs::path dir = fs::temp_directory_path() / "pgv_project_test";
  fs::create_directories(dir);
  std::ofstream(dir / "c.yaml") << contract_yaml(c);
  Contract d = load_contract_file(dir / "c.yaml", *ctx);
  EXPECT_EQ(d.pre, c.pre);
  EXPECT_EQ(d.post, c.post);
}

TEST(Project, ContractScript)
{
  fs::path dir = fs::temp_directory_path() / "pgv_project_test";
  fs::create_directories(dir);
  std::ofstream(dir / "s.yaml") << "contracts:\n  - procedure: ProcessQuery\n    pre: \"true\"\n    post: \"resp\"\n"
                                   "  - procedure: ProcessQuery\n    pre: \"req <u 3\"\n    post: \"true\"\n";
  ContextPtr ctx = make_context({{"req", SemType::uint(8)}, {"resp", SemType::boolean()}});
  std::vector<Contract> cs = load_contract_script(dir / "s.yaml", *ctx);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(pretty_print(cs[0].post), "resp");
}

}  // namespace
