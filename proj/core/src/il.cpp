#include "pgv/il.hpp"

#include <functional>

#include "il_internal.hpp"
#include "pgv/error.hpp"

namespace pgv {

using detail::CmpSign;
using detail::Syn;
using detail::Tok;
using detail::TokenStream;

// ---------------------------------------------------------------------------
// Parsing into untyped syntax

namespace detail {

namespace {

struct SynParser
{
  TokenStream & ts;

  Syn make(Op op, std::size_t begin)
  {
    Syn s;
    s.op = op;
    s.begin = begin;
    return s;
  }

  Syn binary(Op op, Syn a, Syn b)
  {
    Syn s = make(op, a.begin);
    s.end = b.end;
    s.kids.push_back(std::move(a));
    s.kids.push_back(std::move(b));
    return s;
  }

  Syn expr() { return implies(); }

  Syn implies()
  {
    Syn lhs = disj();
    if (ts.accept_punct("==>")) {
      Syn rhs = implies();
      return binary(Op::Implies, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Syn disj()
  {
    Syn lhs = conj();
    while (ts.accept_punct("||")) {
      Syn rhs = conj();
      lhs = binary(Op::Or, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Syn conj()
  {
    Syn lhs = cmp();
    while (ts.accept_punct("&&")) {
      Syn rhs = cmp();
      lhs = binary(Op::And, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  bool cmp_op(Op & op, CmpSign & sign) const
  {
    const Token & t = ts.peek();
    if (t.kind != Tok::Punct) {
      return false;
    }
    const std::string & p = t.text;
    sign = CmpSign::Infer;
    if (p == "==") {
      op = Op::Eq;
    } else if (p == "!=") {
      op = Op::Neq;
    } else {
      std::string base = p;
      if (p.back() == 'u' || p.back() == 's') {
        sign = p.back() == 'u' ? CmpSign::Unsigned : CmpSign::Signed;
        base.pop_back();
      }
      if (base == "<") {
        op = Op::Lt;
      } else if (base == "<=") {
        op = Op::Le;
      } else if (base == ">") {
        op = Op::Gt;
      } else if (base == ">=") {
        op = Op::Ge;
      } else {
        return false;
      }
    }
    return true;
  }

  Syn cmp()
  {
    Syn lhs = sum();
    Op op;
    CmpSign sign;
    if (cmp_op(op, sign)) {
      ts.next();
      Syn rhs = sum();
      Syn s = binary(op, std::move(lhs), std::move(rhs));
      s.sign = sign;
      Op op2;
      CmpSign sign2;
      if (cmp_op(op2, sign2)) {
        throw SyntaxError("comparisons do not chain; add parentheses",
                          ts.offset());
      }
      return s;
    }
    return lhs;
  }

  Syn sum()
  {
    Syn lhs = prod();
    while (true) {
      if (ts.accept_punct("+")) {
        lhs = binary(Op::Add, std::move(lhs), prod());
      } else if (ts.accept_punct("-")) {
        lhs = binary(Op::Sub, std::move(lhs), prod());
      } else {
        return lhs;
      }
    }
  }

  Syn prod()
  {
    Syn lhs = unary();
    while (ts.accept_punct("*")) {
      lhs = binary(Op::Mul, std::move(lhs), unary());
    }
    return lhs;
  }

  Syn unary()
  {
    std::size_t begin = ts.offset();
    if (ts.accept_punct("!")) {
      Syn k = unary();
      Syn s = make(Op::Not, begin);
      s.end = k.end;
      s.kids.push_back(std::move(k));
      return s;
    }
    if (ts.accept_punct("-")) {
      const Token & t = ts.peek();
      if (t.kind != Tok::Int) {
        throw SyntaxError("unary minus applies only to integer literals",
                          begin);
      }
      Syn s = literal(ts.next());
      s.negative = true;
      s.begin = begin;
      return s;
    }
    return postfix();
  }

  Syn literal(const Token & t)
  {
    Syn s = make(Op::IntLit, t.begin);
    s.value = t.value;
    s.suffix = t.suffix;
    s.end = t.end;
    return s;
  }

  Syn postfix()
  {
    Syn e = primary();
    while (ts.is_punct(".") && ts.peek(1).kind == Tok::Ident) {
      ts.next();
      const Token & f = ts.next();
      Syn s = make(Op::Select, e.begin);
      s.name = f.text;
      s.end = f.end;
      s.kids.push_back(std::move(e));
      e = std::move(s);
    }
    return e;
  }

  Syn primary()
  {
    const Token & t = ts.peek();
    std::size_t begin = t.begin;
    if (t.kind == Tok::Int) {
      return literal(ts.next());
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "true" || t.text == "false") {
        Syn s = make(Op::BoolLit, begin);
        s.bool_value = t.text == "true";
        s.end = t.end;
        ts.next();
        return s;
      }
      if (t.text == "old") {
        ts.next();
        ts.expect_punct("(");
        std::string name = ts.expect_name();
        const Token & close = ts.expect_punct(")");
        Syn s = make(Op::Old, begin);
        s.name = std::move(name);
        s.end = close.end;
        return s;
      }
      if (t.text == "if") {
        ts.next();
        Syn c = expr();
        ts.expect_ident("then");
        Syn a = expr();
        ts.expect_ident("else");
        Syn b = expr();
        Syn s = make(Op::Ite, begin);
        s.end = b.end;
        s.kids.push_back(std::move(c));
        s.kids.push_back(std::move(a));
        s.kids.push_back(std::move(b));
        return s;
      }
      if (detail::is_keyword(t.text)) {
        throw SyntaxError("unexpected keyword '" + t.text + "'", begin);
      }
      Syn s = make(Op::Var, begin);
      s.name = t.text;
      s.end = t.end;
      ts.next();
      return s;
    }
    if (ts.accept_punct("(")) {
      Syn e = expr();
      const Token & close = ts.expect_punct(")");
      e.begin = begin;
      e.end = close.end;
      return e;
    }
    if (t.kind == Tok::End) {
      throw SyntaxError("unexpected end of input", begin);
    }
    throw SyntaxError("unexpected token '" + t.text + "'", begin);
  }
};

// ---------------------------------------------------------------------------
// Elaboration

struct Elaborator
{
  const VarContext & ctx;
  Position pos;
  std::string_view text;

  std::string src(const Syn & s) const
  {
    if (s.end <= s.begin || s.end > text.size()) {
      return "<expr>";
    }
    return std::string(text.substr(s.begin, s.end - s.begin));
  }

  static bool needs_context(const Syn & s)
  {
    switch (s.op) {
      case Op::IntLit: return !s.suffix.has_value();
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
        return needs_context(s.kids[0]) && needs_context(s.kids[1]);
      case Op::Ite:
        return needs_context(s.kids[1]) && needs_context(s.kids[2]);
      default: return false;
    }
  }

  Expr int_literal(const Syn & s, const SemType & t)
  {
    if (!t.is_integer()) {
      throw TypeError(src(s), t.str(), "integer literal");
    }
    uint64_t v = s.value;
    unsigned w = t.width();
    if (t.is_signed()) {
      uint64_t limit = w >= 64 ? (uint64_t{1} << 63) : (uint64_t{1} << (w - 1));
      if ((!s.negative && v >= limit) || (s.negative && v > limit)) {
        throw TypeError(src(s), t.str(), "literal out of range");
      }
    } else {
      if (s.negative && v != 0) {
        throw TypeError(src(s), t.str(), "negative literal");
      }
      if (w < 64 && v > t.mask()) {
        throw TypeError(src(s), t.str(), "literal out of range");
      }
    }
    uint64_t bits = s.negative ? (~v + 1) : v;
    return Expr::int_lit(t, bits);
  }

  std::pair<Expr, SemType> synth(const Syn & s)
  {
    switch (s.op) {
      case Op::BoolLit:
        return {Expr::bool_lit(s.bool_value), SemType::boolean()};
      case Op::IntLit:
        if (!s.suffix) {
          throw TypeError(src(s), "typed operand (add a suffix such as 3u8)",
                          "untyped literal");
        }
        return {int_literal(s, *s.suffix), *s.suffix};
      case Op::Var: {
        const SemType * t = ctx.lookup(s.name);
        if (!t) {
          throw UnknownVariable(s.name);
        }
        return {Expr::var(s.name), *t};
      }
      case Op::Old: {
        if (pos == Position::Pre) {
          throw OldInPrecondition();
        }
        const SemType * t = ctx.lookup(s.name);
        if (!t) {
          throw UnknownVariable(s.name);
        }
        return {Expr::old(s.name), *t};
      }
      case Op::Select: {
        auto [r, rt] = synth(s.kids[0]);
        if (!rt.is_record()) {
          throw TypeError(src(s), "record", rt.str());
        }
        const SemType * ft = rt.field_type(s.name);
        if (!ft) {
          throw TypeError(src(s), "field of " + rt.str(), s.name);
        }
        return {Expr::select(r, s.name), *ft};
      }
      case Op::Not:
        return {Expr::lnot(check(s.kids[0], SemType::boolean())),
                SemType::boolean()};
      case Op::And:
      case Op::Or:
      case Op::Implies:
        return {Expr::binary(s.op, check(s.kids[0], SemType::boolean()),
                             check(s.kids[1], SemType::boolean())),
                SemType::boolean()};
      case Op::Eq:
      case Op::Neq: {
        auto [a, b, t] = pair(s.kids[0], s.kids[1]);
        return {Expr::binary(s.op, a, b), SemType::boolean()};
      }
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge: {
        auto [a, b, t] = pair(s.kids[0], s.kids[1]);
        if (!t.is_integer()) {
          throw TypeError(src(s), "integer operands", t.str());
        }
        if (s.sign == CmpSign::Unsigned && t.is_signed()) {
          throw TypeError(src(s), "unsigned operands for unsigned comparator",
                          t.str() + " (signedness mismatch)");
        }
        if (s.sign == CmpSign::Signed && !t.is_signed()) {
          throw TypeError(src(s), "signed operands for signed comparator",
                          t.str() + " (signedness mismatch)");
        }
        return {Expr::compare(s.op, a, b, t.is_signed()), SemType::boolean()};
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul: {
        auto [a, b, t] = pair(s.kids[0], s.kids[1]);
        if (!t.is_integer()) {
          throw TypeError(src(s), "integer operands", t.str());
        }
        return {Expr::binary(s.op, a, b), t};
      }
      case Op::Ite: {
        Expr c = check(s.kids[0], SemType::boolean());
        auto [a, b, t] = pair(s.kids[1], s.kids[2]);
        return {Expr::ite(c, a, b), t};
      }
    }
    throw SyntaxError("unsupported construct", s.begin);
  }

  std::tuple<Expr, Expr, SemType> pair(const Syn & a, const Syn & b)
  {
    if (!needs_context(a)) {
      auto [ea, ta] = synth(a);
      Expr eb = check(b, ta);
      return {ea, eb, ta};
    }
    if (!needs_context(b)) {
      auto [eb, tb] = synth(b);
      Expr ea = check(a, tb);
      return {ea, eb, tb};
    }
    throw TypeError(src(a), "typed operand (add a suffix such as 3u8)",
                    "untyped literal");
  }

  Expr check(const Syn & s, const SemType & expected)
  {
    switch (s.op) {
      case Op::IntLit:
        if (!s.suffix) {
          return int_literal(s, expected);
        }
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
        if (!expected.is_integer()) {
          throw TypeError(src(s), expected.str(), "integer arithmetic");
        }
        return Expr::binary(s.op, check(s.kids[0], expected),
                            check(s.kids[1], expected));
      case Op::Ite:
        return Expr::ite(check(s.kids[0], SemType::boolean()),
                         check(s.kids[1], expected), check(s.kids[2], expected));
      default:
        break;
    }
    auto [e, t] = synth(s);
    if (t != expected) {
      throw TypeError(src(s), expected.str(), t.str());
    }
    return e;
  }
};

}  // namespace

Syn parse_syn(TokenStream & ts)
{
  SynParser p{ts};
  return p.expr();
}

Expr elaborate(const Syn & s, const VarContext & ctx, Position pos,
               const std::optional<SemType> & expected, std::string_view text)
{
  Elaborator el{ctx, pos, text};
  if (expected) {
    return el.check(s, *expected);
  }
  return el.synth(s).first;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public entry points

Expr parse_expr(std::string_view text, const VarContext & ctx, Position pos)
{
  TokenStream ts(text);
  Syn s = detail::parse_syn(ts);
  if (!ts.at_end()) {
    throw SyntaxError("unexpected token '" + ts.peek().text + "'",
                      ts.offset());
  }
  return detail::elaborate(s, ctx, pos, std::nullopt, text);
}

Expr parse_predicate(std::string_view text, const VarContext & ctx,
                     Position pos)
{
  TokenStream ts(text);
  Syn s = detail::parse_syn(ts);
  if (!ts.at_end()) {
    throw SyntaxError("unexpected token '" + ts.peek().text + "'",
                      ts.offset());
  }
  return detail::elaborate(s, ctx, pos, SemType::boolean(), text);
}

Contract parse_contract(std::string_view pre, std::string_view post,
                        const VarContext & ctx)
{
  return Contract{parse_predicate(pre, ctx, Position::Pre),
                  parse_predicate(post, ctx, Position::Post)};
}

// ---------------------------------------------------------------------------
// Type checking of built ASTs

SemType typecheck(const Expr & e, const VarContext & ctx, Position pos)
{
  auto fail = [&](const std::string & expected, const std::string & found) {
    throw TypeError(pretty_print(e), expected, found);
  };
  switch (e.op()) {
    case Op::BoolLit: return SemType::boolean();
    case Op::IntLit: return e.lit_type();
    case Op::Var: {
      const SemType * t = ctx.lookup(e.name());
      if (!t) {
        throw UnknownVariable(e.name());
      }
      return *t;
    }
    case Op::Old: {
      if (pos == Position::Pre) {
        throw OldInPrecondition();
      }
      const SemType * t = ctx.lookup(e.name());
      if (!t) {
        throw UnknownVariable(e.name());
      }
      return *t;
    }
    case Op::Select: {
      SemType rt = typecheck(e.kid(0), ctx, pos);
      const SemType * ft = rt.field_type(e.name());
      if (!rt.is_record() || !ft) {
        fail("record with field " + e.name(), rt.str());
      }
      return *ft;
    }
    case Op::Not: {
      SemType t = typecheck(e.kid(0), ctx, pos);
      if (!t.is_bool()) {
        fail("bool", t.str());
      }
      return t;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
      for (const auto & k : e.kids()) {
        SemType t = typecheck(k, ctx, pos);
        if (!t.is_bool()) {
          fail("bool", t.str());
        }
      }
      return SemType::boolean();
    }
    case Op::Eq:
    case Op::Neq: {
      SemType a = typecheck(e.kid(0), ctx, pos);
      SemType b = typecheck(e.kid(1), ctx, pos);
      if (a != b) {
        fail(a.str(), b.str());
      }
      return SemType::boolean();
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
      SemType a = typecheck(e.kid(0), ctx, pos);
      SemType b = typecheck(e.kid(1), ctx, pos);
      if (a != b) {
        fail(a.str(), b.str());
      }
      if (!a.is_integer()) {
        fail("integer operands", a.str());
      }
      if (a.is_signed() != e.is_signed_cmp()) {
        fail(std::string(e.is_signed_cmp() ? "signed" : "unsigned")
                 + " operands",
             a.str() + " (signedness mismatch)");
      }
      return SemType::boolean();
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      SemType a = typecheck(e.kid(0), ctx, pos);
      SemType b = typecheck(e.kid(1), ctx, pos);
      if (a != b) {
        fail(a.str(), b.str());
      }
      if (!a.is_integer()) {
        fail("integer operands", a.str());
      }
      return a;
    }
    case Op::Ite: {
      SemType c = typecheck(e.kid(0), ctx, pos);
      if (!c.is_bool()) {
        fail("bool condition", c.str());
      }
      SemType a = typecheck(e.kid(1), ctx, pos);
      SemType b = typecheck(e.kid(2), ctx, pos);
      if (a != b) {
        fail(a.str(), b.str());
      }
      return a;
    }
  }
  fail("expression", "unknown node");
  return SemType::boolean();
}

void check_contract(const Contract & c, const VarContext & ctx)
{
  SemType p = typecheck(c.pre, ctx, Position::Pre);
  if (!p.is_bool()) {
    throw TypeError(pretty_print(c.pre), "bool precondition", p.str());
  }
  SemType q = typecheck(c.post, ctx, Position::Post);
  if (!q.is_bool()) {
    throw TypeError(pretty_print(c.post), "bool postcondition", q.str());
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

const char * op_text(const Expr & e)
{
  bool s = e.is_signed_cmp();
  switch (e.op()) {
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Implies: return "==>";
    case Op::Eq: return "==";
    case Op::Neq: return "!=";
    case Op::Lt: return s ? "<s" : "<u";
    case Op::Le: return s ? "<=s" : "<=u";
    case Op::Gt: return s ? ">s" : ">u";
    case Op::Ge: return s ? ">=s" : ">=u";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    default: return "?";
  }
}

bool is_atomic(const Expr & e)
{
  switch (e.op()) {
    case Op::BoolLit:
    case Op::IntLit:
    case Op::Var:
    case Op::Old:
    case Op::Select:
    case Op::Not:
      return true;
    default:
      return false;
  }
}

std::string literal_text(const Expr & e, bool known)
{
  const SemType & t = e.lit_type();
  std::string digits;
  if (t.is_signed()) {
    digits = std::to_string(sign_extend(e.lit_bits(), t.width()));
  } else {
    digits = std::to_string(e.lit_bits());
  }
  return known ? digits : digits + t.str();
}

// `known`: the type of an integer subterm is fixed by its surroundings, so
// bare literals re-elaborate to the same type.
void print(const Expr & e, bool known, std::string & out);

void print_child(const Expr & e, bool known, std::string & out)
{
  if (is_atomic(e)) {
    print(e, known, out);
  } else {
    out += '(';
    print(e, known, out);
    out += ')';
  }
}

void print(const Expr & e, bool known, std::string & out)
{
  switch (e.op()) {
    case Op::BoolLit:
      out += e.bool_value() ? "true" : "false";
      return;
    case Op::IntLit:
      out += literal_text(e, known);
      return;
    case Op::Var:
      out += e.name();
      return;
    case Op::Old:
      out += "old(" + e.name() + ")";
      return;
    case Op::Select:
      print_child(e.kid(0), false, out);
      out += "." + e.name();
      return;
    case Op::Not:
      out += '!';
      print_child(e.kid(0), true, out);
      return;
    case Op::Ite:
      out += "if ";
      print_child(e.kid(0), true, out);
      out += " then ";
      print_child(e.kid(1), known, out);
      out += " else ";
      print_child(e.kid(2), true, out);
      return;
    default:
      break;
  }
  // binary
  bool left_known = is_arith(e.op()) ? known : false;
  if (is_bool_connective(e.op())) {
    left_known = true;
  }
  print_child(e.kid(0), left_known, out);
  out += ' ';
  out += op_text(e);
  out += ' ';
  print_child(e.kid(1), true, out);
}

}  // namespace

std::string pretty_print(const Expr & e)
{
  std::string out;
  print(e, false, out);
  return out;
}

std::string pretty_print_in_context(const Expr & e)
{
  std::string out;
  print(e, true, out);
  return out;
}

// ---------------------------------------------------------------------------
// Free variables

namespace {

void collect_free(const Expr & e, FreeVars & fv)
{
  if (e.op() == Op::Var) {
    fv.post.insert(e.name());
  } else if (e.op() == Op::Old) {
    fv.pre.insert(e.name());
  }
  for (const auto & k : e.kids()) {
    collect_free(k, fv);
  }
}

}  // namespace

FreeVars free_vars(const Expr & e)
{
  FreeVars fv;
  collect_free(e, fv);
  return fv;
}

std::set<std::string> referenced_vars(const Expr & e)
{
  FreeVars fv = free_vars(e);
  fv.pre.insert(fv.post.begin(), fv.post.end());
  return fv.pre;
}

// ---------------------------------------------------------------------------
// Reference interpreter

namespace {

Value eval_rec(const Expr & e, const Assignment & pre, const Assignment * post)
{
  switch (e.op()) {
    case Op::BoolLit: return Value::boolean(e.bool_value());
    case Op::IntLit: return Value::from_bits(e.lit_type(), e.lit_bits());
    case Op::Var: return post ? post->get(e.name()) : pre.get(e.name());
    case Op::Old:
      if (!post) {
        throw MissingPostState();
      }
      return pre.get(e.name());
    case Op::Select: return eval_rec(e.kid(0), pre, post).field(e.name());
    case Op::Not: return Value::boolean(!eval_rec(e.kid(0), pre, post).as_bool());
    case Op::And:
      return Value::boolean(eval_rec(e.kid(0), pre, post).as_bool()
                            && eval_rec(e.kid(1), pre, post).as_bool());
    case Op::Or:
      return Value::boolean(eval_rec(e.kid(0), pre, post).as_bool()
                            || eval_rec(e.kid(1), pre, post).as_bool());
    case Op::Implies:
      return Value::boolean(!eval_rec(e.kid(0), pre, post).as_bool()
                            || eval_rec(e.kid(1), pre, post).as_bool());
    case Op::Eq:
      return Value::boolean(eval_rec(e.kid(0), pre, post)
                            == eval_rec(e.kid(1), pre, post));
    case Op::Neq:
      return Value::boolean(eval_rec(e.kid(0), pre, post)
                            != eval_rec(e.kid(1), pre, post));
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
      Value a = eval_rec(e.kid(0), pre, post);
      Value b = eval_rec(e.kid(1), pre, post);
      int c;
      if (e.is_signed_cmp()) {
        int64_t x = a.as_signed(), y = b.as_signed();
        c = x < y ? -1 : (x > y ? 1 : 0);
      } else {
        uint64_t x = a.bits(), y = b.bits();
        c = x < y ? -1 : (x > y ? 1 : 0);
      }
      switch (e.op()) {
        case Op::Lt: return Value::boolean(c < 0);
        case Op::Le: return Value::boolean(c <= 0);
        case Op::Gt: return Value::boolean(c > 0);
        default: return Value::boolean(c >= 0);
      }
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      Value a = eval_rec(e.kid(0), pre, post);
      Value b = eval_rec(e.kid(1), pre, post);
      uint64_t r = e.op() == Op::Add   ? a.bits() + b.bits()
                   : e.op() == Op::Sub ? a.bits() - b.bits()
                                       : a.bits() * b.bits();
      return Value::from_bits(a.type(), r);
    }
    case Op::Ite:
      return eval_rec(e.kid(0), pre, post).as_bool()
                 ? eval_rec(e.kid(1), pre, post)
                 : eval_rec(e.kid(2), pre, post);
  }
  throw IlError("cannot evaluate expression");
}

}  // namespace

Value eval(const Expr & e, const Assignment & pre, const Assignment * post)
{
  return eval_rec(e, pre, post);
}

// ---------------------------------------------------------------------------
// Record flattening

namespace {

struct Flattener
{
  const VarContext & ctx;

  SemType type_of(const Expr & e) const
  {
    return typecheck(e, ctx, Position::Post);
  }

  static void leaf_paths(const SemType & t, std::vector<std::string> & cur,
                         std::vector<std::vector<std::string>> & out)
  {
    if (!t.is_record()) {
      out.push_back(cur);
      return;
    }
    for (const auto & f : t.fields()) {
      cur.push_back(f.name);
      leaf_paths(f.type, cur, out);
      cur.pop_back();
    }
  }

  // `e` is record-typed; returns the scalar (or record) component at `path`.
  Expr project(const Expr & e, const std::vector<std::string> & path)
  {
    switch (e.op()) {
      case Op::Var:
      case Op::Old: {
        Expr acc = e;
        for (const auto & f : path) {
          acc = Expr::select(acc, f);
        }
        return acc;
      }
      case Op::Select: {
        std::vector<std::string> p;
        p.push_back(e.name());
        p.insert(p.end(), path.begin(), path.end());
        return project(e.kid(0), p);
      }
      case Op::Ite:
        return Expr::ite(flat(e.kid(0)), project(e.kid(1), path),
                         project(e.kid(2), path));
      default:
        throw IlError("unsupported record-valued expression: "
                      + pretty_print(e));
    }
  }

  Expr flat(const Expr & e)
  {
    switch (e.op()) {
      case Op::BoolLit:
      case Op::IntLit:
      case Op::Var:
      case Op::Old:
        return e;
      case Op::Select: {
        // scalar-valued select; rebuild from the root
        return project(e.kid(0), {e.name()});
      }
      case Op::Eq:
      case Op::Neq: {
        SemType t = type_of(e.kid(0));
        if (!t.is_record()) {
          return Expr::binary(e.op(), flat(e.kid(0)), flat(e.kid(1)));
        }
        std::vector<std::vector<std::string>> paths;
        std::vector<std::string> cur;
        leaf_paths(t, cur, paths);
        std::vector<Expr> parts;
        for (const auto & p : paths) {
          parts.push_back(eq(project(e.kid(0), p), project(e.kid(1), p)));
        }
        Expr c = conjunction(parts);
        return e.op() == Op::Eq ? c : Expr::lnot(c);
      }
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        return Expr::compare(e.op(), flat(e.kid(0)), flat(e.kid(1)),
                             e.is_signed_cmp());
      case Op::Not: return Expr::lnot(flat(e.kid(0)));
      case Op::Ite:
        return Expr::ite(flat(e.kid(0)), flat(e.kid(1)), flat(e.kid(2)));
      default:
        return Expr::binary(e.op(), flat(e.kid(0)), flat(e.kid(1)));
    }
  }
};

}  // namespace

Expr flatten_records(const Expr & e, const VarContext & ctx)
{
  Flattener f{ctx};
  if (f.type_of(e).is_record()) {
    throw IlError("cannot flatten a record-valued expression");
  }
  return f.flat(e);
}

}  // namespace pgv
