#include <gtest/gtest.h>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "pgv/minilang.hpp"
#include "support/random_mini.hpp"

using namespace pgv;

namespace {

const char * kProcessQuery = "if (req <u 3) { havoc resp } else { resp := true }";

ContextPtr query_ctx()
{
  return make_context({{"req", SemType::uint(8)}, {"resp", SemType::boolean()}});
}

Assignment qs(const ContextPtr & ctx, uint64_t req, bool resp)
{
  Assignment a(ctx);
  a.set("req", Value::uint(8, req));
  a.set("resp", Value::boolean(resp));
  return a;
}

// Independent reference: loops over every (d, d') of the full domain and asks
// the tree interpreter, using exec_mini only for membership.
bool naive_valid(const Contract & c, const MiniProc & p)
{
  const auto & ctx = p.ctx;
  unsigned bits = 0;
  for (const auto & s : ctx->slots()) {
    bits += s.type.domain_bits();
  }
  auto decode = [&](uint64_t code) {
    Assignment a(ctx);
    for (std::size_t i = 0; i < ctx->slots().size(); ++i) {
      unsigned b = ctx->slots()[i].type.domain_bits();
      a.set_slot(i, code & ((uint64_t{1} << b) - 1));
      code >>= b;
    }
    return a;
  };
  for (uint64_t i = 0; i < (uint64_t{1} << bits); ++i) {
    Assignment d = decode(i);
    if (!holds_pre(c.pre, d)) {
      continue;
    }
    auto posts = exec_mini(p, d);
    for (uint64_t j = 0; j < (uint64_t{1} << bits); ++j) {
      Assignment d1 = decode(j);
      bool reachable = std::find(posts.begin(), posts.end(), d1) != posts.end();
      if (reachable && !holds_post(c.post, d, d1)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST(MiniParse, ProcessQuery)
{
  auto ctx = query_ctx();
  MiniProc p = parse_mini(kProcessQuery, ctx, "ProcessQuery");
  ASSERT_EQ(p.body.size(), 1u);
  const MiniStmt & s = p.body[0];
  EXPECT_EQ(s.kind, MiniStmt::Kind::If);
  EXPECT_EQ(s.cond, lt_u(Expr::var("req"), Expr::uint_lit(8, 3)));
  ASSERT_EQ(s.then_body.size(), 1u);
  EXPECT_EQ(s.then_body[0].kind, MiniStmt::Kind::Havoc);
  ASSERT_EQ(s.else_body.size(), 1u);
  EXPECT_EQ(s.else_body[0].kind, MiniStmt::Kind::Assign);
  EXPECT_EQ(s.else_body[0].rhs, Expr::bool_lit(true));
  EXPECT_EQ(print_mini(p),
            "if (req <u 3) {\n  havoc resp\n} else {\n  resp := true\n}\n");
}

TEST(MiniParse, SaturatingIncrement)
{
  auto ctx = make_context({{"count", SemType::uint(8)}});
  MiniProc p = parse_mini("count := if (count <u 255) then (count + 1) else 255", ctx);
  ASSERT_EQ(p.body.size(), 1u);
  Expr c = Expr::var("count");
  EXPECT_EQ(p.body[0].rhs, Expr::ite(lt_u(c, Expr::uint_lit(8, 255)),
                                     add(c, Expr::uint_lit(8, 1)),
                                     Expr::uint_lit(8, 255)));
  for (uint64_t x : {0u, 7u, 254u, 255u}) {
    Assignment d(ctx);
    d.set("count", Value::uint(8, x));
    auto out = exec_mini(p, d);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].get("count").bits(), x == 255 ? 255 : x + 1);
  }
}

TEST(MiniParse, EmptyBodyIsIdentity)
{
  auto ctx = query_ctx();
  MiniProc p = parse_mini("", ctx, "Nop");
  EXPECT_TRUE(p.body.empty());
  Assignment d = qs(ctx, 9, true);
  auto out = exec_mini(p, d);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], d);
}

TEST(MiniParse, Errors)
{
  auto ctx = query_ctx();
  EXPECT_THROW(parse_mini("req := true", ctx), TypeError);
  EXPECT_THROW(parse_mini("nope := 1", ctx), UnknownVariable);
  EXPECT_THROW(parse_mini("if (req) { skip }", ctx), TypeError);
  EXPECT_THROW(parse_mini("if (resp) { skip ", ctx), SyntaxError);
  EXPECT_THROW(parse_mini("havoc req in 5..2", ctx), TypeError);
  EXPECT_THROW(parse_mini("req := old(req)", ctx), OldInPrecondition);
}

TEST(MiniExec, ProcessQueryStates)
{
  auto ctx = query_ctx();
  MiniProc p = parse_mini(kProcessQuery, ctx, "ProcessQuery");
  auto a = exec_mini(p, qs(ctx, 5, false));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], qs(ctx, 5, true));
  auto b = exec_mini(p, qs(ctx, 1, false));
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0], qs(ctx, 1, false));
  EXPECT_EQ(b[1], qs(ctx, 1, true));
}

TEST(MiniExec, SequentialAndRanges)
{
  auto ctx = make_context({{"a", SemType::uint(4)}, {"b", SemType::sint(4)}});
  MiniProc p = parse_mini("havoc b in -2..1; a := 3; a := a + a", ctx);
  auto out = exec_mini(p, Assignment(ctx));
  ASSERT_EQ(out.size(), 4u);
  for (const auto & s : out) {
    EXPECT_EQ(s.get("a").bits(), 6u);
    int64_t b = s.get("b").as_signed();
    EXPECT_TRUE(b >= -2 && b <= 1);
  }
  EXPECT_EQ(parse_mini(print_mini(p), ctx), p);
}

TEST(MiniExec, RangeCap)
{
  auto ctx = make_context({{"a", SemType::uint(12)}, {"w", SemType::uint(64)}});
  EXPECT_THROW(exec_mini(parse_mini("havoc w", ctx), Assignment(ctx)), RangeTooLarge);
  EXPECT_NO_THROW(exec_mini(parse_mini("havoc a", ctx), Assignment(ctx)));
  EXPECT_THROW(exec_mini(parse_mini("havoc a", ctx), Assignment(ctx), 100), RangeTooLarge);
}

TEST(MiniExec, RecordsAndRun)
{
  SemType port = SemType::parse("{ value: u8, is_present: bool }");
  auto ctx = make_context({{"response", port}, {"x", SemType::uint(8)}});
  MiniProc p = parse_mini("response.value := x + 1; response.is_present := true", ctx);
  Assignment d(ctx);
  d.set("x", Value::uint(8, 4));
  auto out = exec_mini(p, d);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].get("response").field("value").bits(), 5u);
  EXPECT_TRUE(out[0].get("response").field("is_present").as_bool());

  MiniProc h = parse_mini("havoc x in 10..13", ctx);
  Assignment r = run_mini(h, d, [](uint64_t n) { return n - 1; });
  EXPECT_EQ(r.get("x").bits(), 13u);
}

TEST(MiniBrute, QueryCounterexample)
{
  auto ctx = query_ctx();
  MiniProc p = parse_mini(kProcessQuery, ctx, "ProcessQuery");
  Contract c = parse_contract("true", "resp == (req >=u 3)", *ctx);
  BruteResult r = brute_verify(c, p);
  ASSERT_FALSE(r.pass);
  EXPECT_LT(r.pre.get("req").bits(), 3u);
  EXPECT_TRUE(r.post.get("resp").as_bool());
  EXPECT_FALSE(holds_post(c.post, r.pre, r.post));
  EXPECT_TRUE(mini_can_produce(p, r.pre, r.post));
}

TEST(MiniBrute, RefinedQueryPasses)
{
  auto ctx = query_ctx();
  MiniProc p = parse_mini(kProcessQuery, ctx, "ProcessQuery");
  Contract c = parse_contract("true", "((req <u 3) || resp) && (old(req) == req)", *ctx);
  EXPECT_TRUE(brute_verify(c, p).pass);
  Contract vacuous = parse_contract("false", "false", *ctx);
  EXPECT_TRUE(brute_verify(vacuous, p).pass);
}

TEST(MiniBrute, DomainCap)
{
  auto ctx = make_context({{"a", SemType::uint(32)}});
  MiniProc p = parse_mini("a := a + 1", ctx);
  EXPECT_THROW(brute_verify(Contract{}, p), DomainTooLarge);
}

TEST(MiniProperty, AgreesWithNaiveEnumeration)
{
  auto ctx = make_context({{"a", SemType::uint(2)}, {"b", SemType::sint(2)},
                           {"f", SemType::boolean()}});
  testgen::MiniGen gen(ctx, 42);
  int fails = 0, passes = 0;
  for (int i = 0; i < 150; ++i) {
    MiniProc p = gen.gen("P" + std::to_string(i));
    Contract c{gen.exprs().gen(SemType::boolean(), 2, false),
               gen.exprs().gen(SemType::boolean(), 3, true)};
    BruteResult r = brute_verify(c, p);
    EXPECT_EQ(r.pass, naive_valid(c, p)) << print_mini(p);
    if (!r.pass) {
      ++fails;
      EXPECT_TRUE(holds_pre(c.pre, r.pre));
      EXPECT_FALSE(holds_post(c.post, r.pre, r.post));
      EXPECT_TRUE(mini_can_produce(p, r.pre, r.post));
    } else {
      ++passes;
    }
  }
  EXPECT_GT(fails, 10);
  EXPECT_GT(passes, 10);
}

TEST(MiniProperty, TotalityRoundTripAndMonotonicity)
{
  auto ctx = make_context({{"a", SemType::uint(3)}, {"b", SemType::sint(3)},
                           {"f", SemType::boolean()}});
  testgen::MiniGen gen(ctx, 7);
  for (int i = 0; i < 200; ++i) {
    MiniProc p = gen.gen("P");
    std::string text = print_mini(p);
    MiniProc back = parse_mini(text, ctx);
    ASSERT_EQ(back, p) << text << "\nreprinted:\n" << print_mini(back);
    Assignment d = gen.exprs().random_assignment(ctx);
    EXPECT_FALSE(exec_mini(p, d).empty());

    Contract c{gen.exprs().gen(SemType::boolean(), 2, false),
               gen.exprs().gen(SemType::boolean(), 2, true)};
    if (brute_verify(c, p).pass) {
      // strengthening the precondition keeps the triple valid
      Contract stronger{c.pre && gen.exprs().gen(SemType::boolean(), 2, false), c.post};
      EXPECT_TRUE(brute_verify(stronger, p).pass);
    }
  }
}
