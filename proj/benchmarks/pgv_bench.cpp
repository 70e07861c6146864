#include <benchmark/benchmark.h>

#include <random>

#include "pgv/codegen.hpp"
#include "pgv/engine.hpp"
#include "pgv/il.hpp"
#include "pgv/minilang.hpp"
#include "pgv/model_io.hpp"
#include "pgv/oracles.hpp"

using namespace pgv;

namespace {

const std::string kRoot = PGV_REPO_ROOT;

ContextPtr query_ctx()
{
  return make_context({{"req", SemType::uint(8)}, {"resp", SemType::boolean()}});
}

Assignment qs(const ContextPtr & ctx, uint64_t req, bool resp)
{
  return Assignment::from_values(ctx, {{"req", Value::uint(8, req)}, {"resp", Value::boolean(resp)}});
}

ProcedureRef query_proc(const ContextPtr & ctx)
{
  ProcedureRef f;
  f.name = "ProcessQuery";
  f.language = Language::Mini;
  f.source = "if (req <u 3) { havoc resp } else { resp := true }";
  f.mini = std::make_shared<MiniProc>(parse_mini(f.source, ctx, f.name));
  f.writes = mini_writes(*f.mini);
  f.reads = {"req"};
  return f;
}

void BM_EnumSynthesis(benchmark::State & state)
{
  auto ctx = query_ctx();
  ProcedureRef f = query_proc(ctx);
  SynthTask t{&f, ctx, {}, {}, ""};
  t.positive.push_back({qs(ctx, 1, false), qs(ctx, 1, true), Polarity::Positive});
  t.positive.push_back({qs(ctx, 7, false), qs(ctx, 7, true), Polarity::Positive});
  t.negative.push_back({qs(ctx, 2, true), qs(ctx, 10, true), Polarity::Negative});
  t.negative.push_back({qs(ctx, 9, false), qs(ctx, 9, false), Polarity::Negative});
  EnumSynthesizer synth;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth.synthesize(t, {}));
  }
}
BENCHMARK(BM_EnumSynthesis)->Unit(benchmark::kMillisecond);

void BM_BruteVerify(benchmark::State & state)
{
  auto ctx = query_ctx();
  ProcedureRef f = query_proc(ctx);
  Contract c = parse_contract("true", "(old(req) == req) && (resp || (old(req) <u 3))", *ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_verify(c, *f.mini));
  }
}
BENCHMARK(BM_BruteVerify)->Unit(benchmark::kMicrosecond);

// Whole loop on TrainPass with the hermetic oracles; needs z3 on PATH.
void BM_TrainPass(benchmark::State & state)
{
  LoadedModel lm = load_model(kRoot + "/models/trainpass.yaml");
  Property p = parse_property(lm.model, "eventually_within", static_cast<uint64_t>(state.range(0)), "passed");
  EngineConfig cfg;
  cfg.synth = std::make_shared<EnumSynthesizer>();
  cfg.verifier = std::make_shared<MiniVerifier>();
  for (auto _ : state) {
    EngineResult r = polyver(lm.model, p, cfg);
    if (r.outcome == Outcome::Inconclusive) {
      state.SkipWithError(r.reason.c_str());
      break;
    }
    state.counters["cegar"] = static_cast<double>(r.stats.cegar);
  }
}
BENCHMARK(BM_TrainPass)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_Eval(benchmark::State & state)
{
  auto ctx = make_context({{"x", SemType::uint(8)}, {"y", SemType::uint(8)}, {"p", SemType::boolean()}});
  Expr e = parse_expr("(if p then x + y else x * 3u8) <u y ==> !(x == old(y))", *ctx, Position::Post);
  std::mt19937_64 rng(1);
  Assignment a(ctx, {rng() & 255, rng() & 255, 1}), b(ctx, {rng() & 255, rng() & 255, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval(e, a, &b));
  }
}
BENCHMARK(BM_Eval);

void BM_CompileBackends(benchmark::State & state)
{
  auto ctx = make_context({{"x", SemType::uint(8)}, {"y", SemType::sint(5)}, {"p", SemType::boolean()}});
  Expr e = parse_expr("(if p then x + 1u8 else x) <u 9u8 && y * y >s 2i5 || old(p)", *ctx, Position::Post);
  NameMap nm = NameMap::identity(*ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compile_to_c(e, *ctx, nm));
    benchmark::DoNotOptimize(compile_to_rust(e, *ctx, nm));
    benchmark::DoNotOptimize(compile_to_smt(e, *ctx, nm));
  }
}
BENCHMARK(BM_CompileBackends);

}  // namespace

BENCHMARK_MAIN();
