#include <gtest/gtest.h>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "pgv/model.hpp"
#include "pgv/model_io.hpp"

using namespace pgv;

namespace {

const std::string kTrainPass = std::string(PGV_REPO_ROOT) + "/models/trainpass.yaml";

PolyglotModel trainpass()
{
  return load_model(kTrainPass).model;
}

Property prop(const PolyglotModel & m, const std::string & kind, uint64_t within,
              const std::string & pred)
{
  return parse_property(m, kind, within, pred);
}

bool has_code(const std::vector<Diagnostic> & ds, const std::string & code)
{
  for (const auto & d : ds) {
    if (d.code == code) {
      return true;
    }
  }
  return false;
}

const char * kSmall = R"(
name: small
vars: {x: u2, b: bool}
modes: [a, z]
terminal: [z]
init: {mode: a, predicate: "x == 0"}
procedures:
  Inc: {source: "x := x + 1"}
  Flip: {source: "havoc b"}
transitions:
  - {id: step, from: a, to: a, guard: "x <u 3", update: [Inc, Flip], duration: 1}
  - {id: stop, from: a, to: z, guard: "b", update: [Flip]}
)";

}  // namespace

TEST(ModelLoad, TrainPassValidates)
{
  auto lm = load_model(kTrainPass);
  EXPECT_TRUE(validate_model(lm.model).empty());
  ASSERT_TRUE(lm.property.has_value());
  EXPECT_EQ(lm.property->kind, PropertyKind::EventuallyWithin);
  EXPECT_EQ(lm.property->within, 12u);
  EXPECT_EQ(lm.model.init.mode, kStartMode);
  EXPECT_EQ(lm.model.procedure("ProcessResponse").reads, std::set<std::string>{"resp"});
  EXPECT_EQ(lm.model.procedure("Waited").writes,
            (std::set<std::string>{"count", "req"}));
}

TEST(ModelLoad, UnknownProcedureDiagnostic)
{
  auto m = parse_model_yaml(kSmall).model;
  m.transitions[0].update.push_back("Nope");
  auto ds = validate_model(m);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].code, "UnknownProcedure");
}

TEST(ModelLoad, OldInGuardDiagnostic)
{
  std::string text = kSmall;
  text.replace(text.find("\"x <u 3\""), 8, "\"old(x) <u 3\"");
  auto m = parse_model_yaml(text).model;
  auto ds = validate_model(m);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].code, "OldInGuard");
}

TEST(ModelLoad, OtherDiagnostics)
{
  auto m = parse_model_yaml(kSmall).model;
  m.transitions.push_back({"back", "z", "a", Expr::bool_lit(true), {"Inc"}, 0});
  EXPECT_TRUE(has_code(validate_model(m), "TerminalHasTransitions"));
  m = parse_model_yaml(kSmall).model;
  m.init.mode = "nowhere";
  EXPECT_TRUE(has_code(validate_model(m), "UnknownMode"));
  m = parse_model_yaml(kSmall).model;
  m.transitions[1].update.clear();
  EXPECT_TRUE(has_code(validate_model(m), "EmptyUpdate"));
}

TEST(ModelLoad, SchemaErrors)
{
  EXPECT_THROW(parse_model_yaml("name: x\nmodes: [a]\n"), ModelError);
  EXPECT_THROW(parse_model_yaml("vars: {x: u99}\nmodes: [a]\ninit: {mode: a}\n"),
               ModelError);
  EXPECT_THROW(parse_model_yaml("vars: {x: u2}\nmodes: [a]\ninit: {mode: a}\nbogus: 1\n"),
               ModelError);
  EXPECT_THROW(parse_model_yaml(
                   "vars: {x: u2}\nmodes: [a]\ninit: {mode: a, predicate: \"x +\"}\n"),
               ModelError);
  EXPECT_THROW(load_model("/nonexistent/model.yaml"), ModelError);
  try {
    parse_model_yaml("vars: {x: u2}\nmodes: [a]\ninit: {mode: a}\n"
                     "procedures:\n  P: {source: \"y := 1\"}\n");
    FAIL();
  } catch (const ModelError & e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(Simulate, ThreeDenialsThenGrant)
{
  auto m = trainpass();
  ScriptedScheduler s({}, {0, 0, 0, 1});
  Trace t = simulate(m, 50, s);
  ASSERT_TRUE(t.maximal);
  EXPECT_FALSE(t.stuck);
  const auto & last = t.steps.back();
  EXPECT_EQ(last.mode, "done");
  EXPECT_TRUE(last.state.get("passed").as_bool());
  EXPECT_EQ(last.time, 16u);
  EXPECT_EQ(t.steps.size(), 10u);
  EXPECT_TRUE(check_trace(m, t).empty());

  EXPECT_EQ(holds(m, prop(m, "eventually_within", 12, "passed"), t), Truth::False);
  EXPECT_EQ(holds(m, prop(m, "eventually_within", 16, "passed"), t), Truth::True);
  EXPECT_EQ(holds(m, prop(m, "invariant", 0, "true"), t), Truth::True);
  EXPECT_EQ(holds(m, prop(m, "invariant", 0, "passed ==> mode.done"), t), Truth::True);
}

TEST(Simulate, ImmediateGrant)
{
  auto m = trainpass();
  ScriptedScheduler s({}, {1});
  Trace t = simulate(m, 50, s);
  EXPECT_EQ(t.steps.back().mode, "done");
  EXPECT_EQ(t.steps.back().time, 10u);
  EXPECT_EQ(holds(m, prop(m, "eventually_within", 12, "passed"), t), Truth::True);
}

TEST(Simulate, DenialsSaturateAtThree)
{
  // The fourth request is always granted.
  auto m = trainpass();
  ScriptedScheduler s({}, {0, 0, 0, 0, 0, 0});
  Trace t = simulate(m, 50, s);
  EXPECT_EQ(t.steps.back().time, 16u);
  EXPECT_EQ(t.steps.back().state.get("count").bits(), 3u);
}

TEST(Simulate, ZeroSteps)
{
  auto m = trainpass();
  SeededScheduler s(1);
  Trace t = simulate(m, 0, s);
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.steps[0].mode, kStartMode);
  EXPECT_EQ(t.steps[0].state.get("count").bits(), 0u);
  EXPECT_FALSE(t.steps[0].state.get("passed").as_bool());
  EXPECT_FALSE(t.maximal);
  EXPECT_EQ(holds(m, prop(m, "eventually_within", 12, "passed"), t),
            Truth::Inconclusive);
}

TEST(Simulate, DeterministicPerSeed)
{
  auto m = trainpass();
  for (uint64_t seed = 0; seed < 20; ++seed) {
    SeededScheduler a(seed), b(seed);
    Trace ta = simulate(m, 30, a), tb = simulate(m, 30, b);
    ASSERT_EQ(ta.steps.size(), tb.steps.size());
    for (std::size_t i = 0; i < ta.steps.size(); ++i) {
      EXPECT_EQ(ta.steps[i].state, tb.steps[i].state);
      EXPECT_EQ(ta.steps[i].transition, tb.steps[i].transition);
    }
  }
}

TEST(Simulate, TracesChainAndStayWithinSixteen)
{
  auto m = trainpass();
  auto within16 = prop(m, "eventually_within", 16, "passed");
  for (uint64_t seed = 0; seed < 200; ++seed) {
    SeededScheduler s(seed);
    Trace t = simulate(m, 30, s);
    EXPECT_TRUE(check_trace(m, t).empty()) << seed;
    EXPECT_TRUE(t.maximal);
    EXPECT_EQ(holds(m, within16, t), Truth::True) << seed;
  }
}

TEST(Simulate, StuckAndMonotoneInvariant)
{
  auto m = parse_model_yaml(kSmall).model;
  ASSERT_TRUE(validate_model(m).empty());
  auto inv = prop(m, "invariant", 0, "x <u 2");
  for (uint64_t seed = 0; seed < 50; ++seed) {
    SeededScheduler s(seed);
    Trace t = simulate(m, 10, s);
    EXPECT_TRUE(check_trace(m, t).empty());
    if (t.stuck) {
      EXPECT_EQ(t.steps.back().mode, "a");
      EXPECT_EQ(t.steps.back().state.get("x").bits(), 3u);
      EXPECT_FALSE(t.steps.back().state.get("b").as_bool());
    }
    // A violation in a prefix persists in every extension.
    bool seen = false;
    for (std::size_t k = 1; k <= t.steps.size(); ++k) {
      Trace prefix;
      prefix.steps.assign(t.steps.begin(), t.steps.begin() + k);
      Truth r = holds(m, inv, prefix);
      if (seen) {
        EXPECT_EQ(r, Truth::False);
      }
      seen = seen || r == Truth::False;
    }
  }
}

TEST(Simulate, CheckTraceFindsTampering)
{
  auto m = trainpass();
  ScriptedScheduler s({}, {0, 1});
  Trace t = simulate(m, 50, s);
  ASSERT_TRUE(check_trace(m, t).empty());
  Trace bad = t;
  bad.steps[2].time += 1;
  EXPECT_FALSE(check_trace(m, bad).empty());
  bad = t;
  bad.steps[3].calls[0].post.set("count", Value::uint(8, 9));
  EXPECT_FALSE(check_trace(m, bad).empty());
}

TEST(Simulate, RejectsNonMiniProcedures)
{
  auto m = trainpass();
  m.procedures.at("Passed").language = Language::C;
  SeededScheduler s(0);
  EXPECT_THROW(simulate(m, 5, s), ModelError);
}
