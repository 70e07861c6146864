#include <gtest/gtest.h>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "support/random_expr.hpp"

using namespace pgv;

namespace {

ContextPtr req_ctx(unsigned width = 32)
{
  return make_context({{"req", SemType::uint(width)}, {"resp", SemType::boolean()}});
}

Assignment req_state(const ContextPtr & ctx, uint64_t req, bool resp)
{
  Assignment a(ctx);
  a.set("req", Value::from_bits(*ctx->lookup("req"), req));
  a.set("resp", Value::boolean(resp));
  return a;
}

}  // namespace

TEST(IlParse, TrueLiteral)
{
  auto ctx = req_ctx();
  EXPECT_EQ(parse_expr("true", *ctx, Position::Post), Expr::bool_lit(true));
}

TEST(IlParse, RequestPostcondition)
{
  auto ctx = req_ctx();
  Expr e = parse_expr("(req < 3) || resp", *ctx, Position::Post);
  Expr want = lt_u(Expr::var("req"), Expr::uint_lit(32, 3)) || Expr::var("resp");
  EXPECT_EQ(e, want);
}

TEST(IlParse, OldEquality)
{
  auto ctx = req_ctx();
  Expr e = parse_expr("old(req) == req", *ctx, Position::Post);
  EXPECT_EQ(e, eq(Expr::old("req"), Expr::var("req")));
}

TEST(IlParse, Errors)
{
  auto ctx = req_ctx();
  EXPECT_THROW(parse_expr("req <", *ctx, Position::Post), SyntaxError);
  EXPECT_THROW(parse_expr("nope == 1", *ctx, Position::Post), UnknownVariable);
  EXPECT_THROW(parse_expr("old(req) == req", *ctx, Position::Pre), OldInPrecondition);
  EXPECT_THROW(parse_expr("req <s 3", *ctx, Position::Post), TypeError);
  EXPECT_THROW(parse_expr("req == resp", *ctx, Position::Post), TypeError);
  EXPECT_THROW(parse_expr("req < 1 < 2", *ctx, Position::Post), SyntaxError);
  EXPECT_THROW(parse_expr("3 == 3", *ctx, Position::Post), TypeError);
  EXPECT_THROW(parse_predicate("req", *ctx, Position::Post), TypeError);
  try {
    parse_expr("req == (", *ctx, Position::Post);
    FAIL();
  } catch (const SyntaxError & e) {
    EXPECT_EQ(e.offset(), 8u);
  }
}

TEST(IlParse, LiteralRanges)
{
  auto ctx = make_context({{"x", SemType::uint(8)}, {"y", SemType::sint(4)}});
  EXPECT_NO_THROW(parse_expr("x == 255", *ctx, Position::Pre));
  EXPECT_THROW(parse_expr("x == 256", *ctx, Position::Pre), TypeError);
  EXPECT_THROW(parse_expr("x == -1", *ctx, Position::Pre), TypeError);
  EXPECT_NO_THROW(parse_expr("y == -8", *ctx, Position::Pre));
  EXPECT_NO_THROW(parse_expr("y == 7", *ctx, Position::Pre));
  EXPECT_THROW(parse_expr("y == 8", *ctx, Position::Pre), TypeError);
  EXPECT_EQ(parse_expr("x == 0xff", *ctx, Position::Pre),
            eq(Expr::var("x"), Expr::uint_lit(8, 255)));
  EXPECT_EQ(parse_expr("y < -2", *ctx, Position::Pre),
            lt_s(Expr::var("y"), Expr::sint_lit(4, -2)));
}

TEST(IlTypecheck, Examples)
{
  auto ctx = req_ctx();
  EXPECT_EQ(typecheck(add(Expr::uint_lit(32, 1), Expr::uint_lit(32, 2)), *ctx,
                      Position::Pre),
            SemType::uint(32));
  EXPECT_EQ(typecheck(lt_u(Expr::var("req"), Expr::uint_lit(32, 3)), *ctx,
                      Position::Pre),
            SemType::boolean());
  try {
    typecheck(lt_s(Expr::var("req"), Expr::uint_lit(32, 3)), *ctx, Position::Pre);
    FAIL();
  } catch (const TypeError & e) {
    EXPECT_NE(e.found().find("signedness mismatch"), std::string::npos);
  }
  EXPECT_THROW(typecheck(eq(Expr::var("req"), Expr::uint_lit(8, 3)), *ctx,
                         Position::Pre),
               TypeError);
}

TEST(IlEval, QueryCandidates)
{
  auto ctx = req_ctx();
  Assignment d = req_state(ctx, 1, false);
  Assignment d1 = req_state(ctx, 1, true);
  Expr q1 = parse_predicate("resp == (req >=u 3)", *ctx, Position::Post);
  Expr q2 = parse_predicate("(req <u 3) || (resp == true)", *ctx, Position::Post);
  EXPECT_FALSE(holds_post(q1, d, d1));
  EXPECT_TRUE(holds_post(q2, d, d1));
}

TEST(IlEval, Wraparound)
{
  auto ctx = make_context({{"x", SemType::uint(32)}});
  Assignment a(ctx);
  a.set("x", Value::uint(32, 0xffffffffu));
  Value v = eval(add(Expr::var("x"), Expr::uint_lit(32, 1)), a, nullptr);
  EXPECT_EQ(v, Value::uint(32, 0));
}

TEST(IlEval, MissingPostState)
{
  auto ctx = req_ctx();
  Assignment d = req_state(ctx, 1, false);
  EXPECT_THROW(eval(eq(Expr::old("req"), Expr::var("req")), d, nullptr),
               MissingPostState);
}

TEST(IlEval, ExhaustiveSmallWidths)
{
  for (unsigned w = 1; w <= 4; ++w) {
    auto ctx = make_context({{"a", SemType::uint(w)}, {"b", SemType::uint(w)},
                             {"p", SemType::sint(w)}, {"q", SemType::sint(w)}});
    uint64_t n = uint64_t{1} << w;
    uint64_t m = n - 1;
    Expr a = Expr::var("a"), b = Expr::var("b");
    Expr p = Expr::var("p"), q = Expr::var("q");
    for (uint64_t x = 0; x < n; ++x) {
      for (uint64_t y = 0; y < n; ++y) {
        Assignment s(ctx);
        s.set("a", Value::uint(w, x));
        s.set("b", Value::uint(w, y));
        s.set("p", Value::from_bits(SemType::sint(w), x));
        s.set("q", Value::from_bits(SemType::sint(w), y));
        EXPECT_EQ(eval(add(a, b), s, nullptr).bits(), (x + y) % n);
        EXPECT_EQ(eval(sub(a, b), s, nullptr).bits(), (x + n - y) % n);
        EXPECT_EQ(eval(mul(a, b), s, nullptr).bits(), (x * y) % n);
        EXPECT_EQ(eval(lt_u(a, b), s, nullptr).as_bool(), x < y);
        // two's-complement reading, computed independently
        long long sx = x >= n / 2 ? (long long)x - (long long)n : (long long)x;
        long long sy = y >= n / 2 ? (long long)y - (long long)n : (long long)y;
        EXPECT_EQ(eval(lt_s(p, q), s, nullptr).as_bool(), sx < sy);
        EXPECT_EQ(eval(Expr::compare(Op::Ge, p, q, true), s, nullptr).as_bool(),
                  sx >= sy);
        EXPECT_EQ(eval(add(p, q), s, nullptr).bits(), (x + y) & m);
      }
    }
  }
}

TEST(IlPrint, Examples)
{
  EXPECT_EQ(pretty_print(Expr::bool_lit(true)), "true");
  Expr e = lt_u(Expr::var("req"), Expr::uint_lit(32, 3)) || Expr::var("resp");
  EXPECT_EQ(pretty_print(e), "(req <u 3) || resp");
  Expr x = Expr::var("x");
  Expr sat = Expr::ite(lt_u(x, Expr::uint_lit(8, 255)),
                       add(x, Expr::uint_lit(8, 1)), Expr::uint_lit(8, 255));
  EXPECT_EQ(pretty_print(sat), "if (x <u 255) then (x + 1) else 255");
  EXPECT_EQ(pretty_print(eq(Expr::uint_lit(8, 3), x)), "3u8 == x");
  EXPECT_EQ(pretty_print(Expr::sint_lit(4, -2)), "-2i4");
}

TEST(IlFreeVars, Examples)
{
  auto ctx = req_ctx();
  FreeVars a = free_vars(parse_expr("old(req) == req", *ctx, Position::Post));
  EXPECT_EQ(a.pre, std::set<std::string>{"req"});
  EXPECT_EQ(a.post, std::set<std::string>{"req"});
  FreeVars b = free_vars(Expr::bool_lit(true));
  EXPECT_TRUE(b.pre.empty() && b.post.empty());
  FreeVars c = free_vars(parse_expr("(req <u 3) || (resp == true)", *ctx, Position::Post));
  EXPECT_TRUE(c.pre.empty());
  EXPECT_EQ(c.post, (std::set<std::string>{"req", "resp"}));
}

TEST(IlRecords, SelectAndFlatten)
{
  SemType port = SemType::parse("{ value: u8, is_present: bool }");
  auto ctx = make_context({{"request", port}, {"n", SemType::uint(8)}});
  Expr e = parse_predicate("old(request) == request && request.value <u n",
                           *ctx, Position::Post);
  Expr f = flatten_records(e, *ctx);
  EXPECT_EQ(pretty_print(f),
            "((old(request).value == request.value) && "
            "(old(request).is_present == request.is_present)) && "
            "(request.value <u n)");
  // flattening preserves meaning
  testgen::ExprGen g(*ctx, 7);
  for (int i = 0; i < 200; ++i) {
    Assignment pre = g.random_assignment(ctx);
    Assignment post = i % 3 == 0 ? pre : g.random_assignment(ctx);
    EXPECT_EQ(eval(e, pre, &post), eval(f, pre, &post));
  }
}

TEST(IlProperty, RoundTripAndTotality)
{
  SemType port = SemType::parse("{ value: u8, ok: bool }");
  auto ctx = make_context({{"a", SemType::uint(8)},
                           {"b", SemType::uint(8)},
                           {"c", SemType::sint(3)},
                           {"d", SemType::sint(64)},
                           {"e", SemType::uint(64)},
                           {"f", SemType::boolean()},
                           {"g", SemType::uint(5)},
                           {"p", port}});
  testgen::ExprGen gen(*ctx, 1234);
  for (int i = 0; i < 3000; ++i) {
    bool post = i % 2 == 0;
    SemType t = i % 3 == 0 ? gen.pick_int_type() : SemType::boolean();
    Expr e = gen.gen(t, 1 + i % 5, post);
    Position pos = post ? Position::Post : Position::Pre;
    std::string text = pretty_print(e);
    Expr back;
    ASSERT_NO_THROW(back = parse_expr(text, *ctx, pos)) << text;
    ASSERT_EQ(back, e) << text << "\n  reprinted: " << pretty_print(back);
    ASSERT_EQ(typecheck(e, *ctx, pos), t);
    Assignment s = gen.random_assignment(ctx);
    Assignment s2 = gen.random_assignment(ctx);
    Value v = post ? eval(e, s, &s2) : eval(e, s, nullptr);
    ASSERT_EQ(v.type(), t);
  }
}

TEST(IlProperty, OldAlwaysRejectedInPre)
{
  auto ctx = make_context({{"a", SemType::uint(4)}, {"f", SemType::boolean()}});
  testgen::ExprGen gen(*ctx, 99);
  int with_old = 0;
  for (int i = 0; i < 500; ++i) {
    Expr e = gen.gen(SemType::boolean(), 4, true);
    if (free_vars(e).pre.empty()) {
      continue;
    }
    ++with_old;
    EXPECT_THROW(typecheck(e, *ctx, Position::Pre), OldInPrecondition);
  }
  EXPECT_GT(with_old, 50);
}
