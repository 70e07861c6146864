#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pgv/codegen.hpp"
#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "pgv/model_io.hpp"
#include "pgv/oracles.hpp"
#include "pgv/project.hpp"
#include "pgv/subprocess.hpp"
#include "support/explore.hpp"
#include "support/native_eval.hpp"
#include "support/random_expr.hpp"

using namespace pgv;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = PGV_TEST_FIXTURES;
const std::string kPolyglot = std::string(PGV_REPO_ROOT) + "/models/trainpass_polyglot.yaml";

ContextPtr mixed_ctx()
{
  return make_context({{"x", SemType::uint(8)},
                       {"y", SemType::uint(8)},
                       {"p", SemType::boolean()},
                       {"s", SemType::sint(8)},
                       {"u", SemType::uint(3)},
                       {"i", SemType::sint(5)}});
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

struct Case
{
  const char * text;
  const char * c;
  const char * rust;
  const char * smt;
};

// Expected strings were checked by hand against two's-complement semantics.
const Case kCases[] = {
    {"x + y <u 3u8", "(((uint8_t)((uint64_t)x + (uint64_t)y)) < 3U)", "(x.wrapping_add(y) < 3u8)",
     "(bvult (bvadd x y) (_ bv3 8))"},
    {"old(x) == x && p", "((old_x == x) && p)", "((old_x == x) && p)", "(and (= old_x x) p)"},
    {"(if p then x else y) == 0u8", "(((uint8_t)(p ? x : y)) == 0U)", "((if p { x } else { y }) == 0u8)",
     "(= (ite p x y) (_ bv0 8))"},
    {"s - 1i8 <s s", "(((int8_t)((uint64_t)s - (uint64_t)((int8_t)1))) < s)", "(s.wrapping_sub(1i8) < s)",
     "(bvslt (bvsub s (_ bv1 8)) s)"},
    {"u + 1u3 == 0u3", "(((uint8_t)(((uint64_t)u + (uint64_t)1U) & 0x7ULL)) == 0U)",
     "((u.wrapping_add(1u8) & 0x7u8) == 0u8)", "(= (bvadd u (_ bv1 3)) (_ bv0 3))"},
    {"i * i >s 3i5", "(((int8_t)((int64_t)(((uint64_t)i * (uint64_t)i) << 59) >> 59)) > ((int8_t)3))",
     "(((i.wrapping_mul(i) << 3) >> 3) > 3i8)", "(bvsgt (bvmul i i) (_ bv3 5))"},
    {"(x <u 3u8) ==> !p", "(!(x < 3U) || (!p))", "(!(x < 3u8) || (!p))", "(=> (bvult x (_ bv3 8)) (not p))"},
};

TEST(Compile, KnownExpressions)
{
  ContextPtr ctx = mixed_ctx();
  NameMap nm = NameMap::identity(*ctx);
  for (const auto & k : kCases) {
    Expr e = parse_expr(k.text, *ctx, Position::Post);
    EXPECT_EQ(compile_to_c(e, *ctx, nm), k.c) << k.text;
    EXPECT_EQ(compile_to_rust(e, *ctx, nm), k.rust) << k.text;
    EXPECT_EQ(compile_to_smt(e, *ctx, nm), k.smt) << k.text;
  }
}

TEST(Compile, PortAndPointerAccess)
{
  ContextPtr ctx = make_context({{"req", SemType::uint(8)}, {"resp", SemType::boolean()}});
  NameMap nm;
  nm.post["req"] = {"request", AccessStyle::Port};
  nm.post["resp"] = {"out", AccessStyle::Pointer};
  nm.pre["req"] = {"old_req", AccessStyle::Direct};
  Expr e = parse_expr("resp || old(req) == req", *ctx, Position::Post);
  EXPECT_EQ(compile_to_c(e, *ctx, nm), "((*out) || (old_req == request->value))");
}

TEST(Compile, UnmappedVariableIsAnError)
{
  ContextPtr ctx = mixed_ctx();
  NameMap nm;
  nm.post["x"] = {"x", AccessStyle::Direct};
  Expr e = parse_expr("x == y", *ctx, Position::Pre);
  EXPECT_THROW(compile_to_c(e, *ctx, nm), UnmappedVariable);
  EXPECT_THROW(compile_to_rust(e, *ctx, nm), UnmappedVariable);
  Expr o = parse_expr("old(x) == x", *ctx, Position::Post);
  EXPECT_THROW(compile_to_c(o, *ctx, nm), UnmappedVariable);
}

TEST(Compile, Types)
{
  EXPECT_EQ(c_type(SemType::boolean()), "_Bool");
  EXPECT_EQ(c_type(SemType::uint(8)), "uint8_t");
  EXPECT_EQ(c_type(SemType::sint(5)), "int8_t");
  EXPECT_EQ(c_type(SemType::uint(33)), "uint64_t");
  EXPECT_EQ(rust_type(SemType::boolean()), "bool");
  EXPECT_EQ(rust_type(SemType::sint(16)), "i16");
  EXPECT_EQ(smt_sort(SemType::uint(3)), "(_ BitVec 3)");
  EXPECT_EQ(smt_value(SemType::sint(5), 0x1f), "(_ bv31 5)");
  EXPECT_EQ(smt_symbol("a.b"), "a.b");
  EXPECT_EQ(smt_symbol("a b"), "|a b|");
  EXPECT_EQ(smt_symbol("old_x"), "old_x");
}

// Harnesses for the polyglot TrainPass model are pinned byte for byte.
class GoldenHarness : public ::testing::Test
{
 protected:
  static void SetUpTestSuite() { model_ = new LoadedModel(load_model(kPolyglot)); }
  static void TearDownTestSuite() { delete model_; }

  HarnessSpec spec(const std::string & proc, const std::string & contract)
  {
    const PolyglotModel & m = model_->model;
    Contract c = load_contract_file(kFixtures + "/contracts/" + contract, *m.vars);
    return harness_for(m.procedures.at(proc), m.vars, c);
  }

  static LoadedModel * model_;
};

LoadedModel * GoldenHarness::model_ = nullptr;

TEST_F(GoldenHarness, CbmcGolden)
{
  std::string text = emit_cbmc_harness(spec("ProcessQuery", "process_query.yaml"));
  EXPECT_EQ(text, slurp(kFixtures + "/golden/ProcessQuery_harness.c"));
  EXPECT_NE(text.find("request->value"), std::string::npos);
}

TEST_F(GoldenHarness, KaniGolden)
{
  std::string text = emit_kani_harness(spec("Waited", "waited.yaml"));
  EXPECT_EQ(text, slurp(kFixtures + "/golden/Waited_harness.rs"));
}

TEST_F(GoldenHarness, ContextFollowsDeclarationOrder)
{
  HarnessSpec h = spec("ProcessQuery", "process_query.yaml");
  VarContext ctx = harness_context(h);
  ASSERT_EQ(ctx.size(), h.vars.size());
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    EXPECT_EQ(ctx.name(i), h.vars[i].name);
  }
}

TEST_F(GoldenHarness, CbmcHarnessCompiles)
{
  if (!testgen::have_tool("cc")) {
    GTEST_SKIP() << "no C compiler";
  }
  fs::path dir = fs::temp_directory_path() / "pgv_codegen_cc";
  fs::create_directories(dir);
  std::ofstream(dir / "h.c") << emit_cbmc_harness(spec("ProcessQuery", "process_query_q1.yaml"));
  ProcessResult r = run_process({"cc", "-fsyntax-only", "-std=c11", "-D__CPROVER_assume(x)=((void)(x))",
                                 (dir / "h.c").string()});
  EXPECT_EQ(r.exit_code, 0) << r.err;
}

// Native agreement on small odd-width contexts, exhaustively.
class Native : public ::testing::TestWithParam<const char *>
{
};

TEST_P(Native, AgreesWithInterpreter)
{
  std::string lang = GetParam();
  if (!testgen::have_tool(lang == "c" ? "cc" : "rustc")) {
    GTEST_SKIP() << lang << " toolchain not found";
  }
  ContextPtr ctx = make_context({{"u", SemType::uint(3)},
                                 {"i", SemType::sint(5)},
                                 {"p", SemType::boolean()},
                                 {"w", SemType::uint(4)},
                                 {"j", SemType::sint(4)}});
  testgen::ExprGen gen(*ctx, 77);
  std::vector<Expr> es;
  for (int k = 0; k < 60; ++k) {
    es.push_back(gen.gen(SemType::boolean(), 4, false));
  }
  fs::path dir = fs::temp_directory_path() / ("pgv_native_" + lang);
  fs::create_directories(dir);
  testgen::NativeResult r = lang == "c" ? testgen::run_c(es, *ctx, dir) : testgen::run_rust(es, *ctx, dir);
  ASSERT_TRUE(r.hashes) << r.log;
  std::vector<Assignment> states = testgen::all_states(ctx);
  for (std::size_t k = 0; k < es.size(); ++k) {
    EXPECT_EQ((*r.hashes)[k], testgen::interpreter_hash(es[k], states)) << pretty_print(es[k]);
  }
}

INSTANTIATE_TEST_SUITE_P(Languages, Native, ::testing::Values("c", "rust"));

}  // namespace
