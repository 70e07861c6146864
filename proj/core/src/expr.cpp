#include "pgv/expr.hpp"

#include <algorithm>

namespace pgv {

bool is_comparison(Op op)
{
  return op == Op::Lt || op == Op::Le || op == Op::Gt || op == Op::Ge;
}

bool is_arith(Op op) { return op == Op::Add || op == Op::Sub || op == Op::Mul; }

bool is_bool_connective(Op op)
{
  return op == Op::And || op == Op::Or || op == Op::Implies;
}

Expr::Expr()
{
  auto n = std::make_shared<ExprNode>();
  n->op = Op::BoolLit;
  n->flag = true;
  node_ = std::move(n);
}

Expr Expr::bool_lit(bool b)
{
  auto n = std::make_shared<ExprNode>();
  n->op = Op::BoolLit;
  n->flag = b;
  return Expr(std::move(n));
}

Expr Expr::int_lit(const SemType & type, uint64_t bits)
{
  auto n = std::make_shared<ExprNode>();
  n->op = Op::IntLit;
  n->lit_type = type;
  n->bits = bits & type.mask();
  return Expr(std::move(n));
}

Expr Expr::var(std::string name)
{
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::old(std::string name)
{
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Old;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::select(Expr record, std::string field)
{
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Select;
  n->name = std::move(field);
  n->kids.push_back(std::move(record));
  return Expr(std::move(n));
}

Expr Expr::lnot(Expr e)
{
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Not;
  n->kids.push_back(std::move(e));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr a, Expr b)
{
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->kids.push_back(std::move(a));
  n->kids.push_back(std::move(b));
  return Expr(std::move(n));
}

Expr Expr::compare(Op op, Expr a, Expr b, bool is_signed)
{
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->flag = is_signed;
  n->kids.push_back(std::move(a));
  n->kids.push_back(std::move(b));
  return Expr(std::move(n));
}

Expr Expr::ite(Expr c, Expr t, Expr e)
{
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Ite;
  n->kids.push_back(std::move(c));
  n->kids.push_back(std::move(t));
  n->kids.push_back(std::move(e));
  return Expr(std::move(n));
}

std::size_t Expr::size() const
{
  std::size_t n = 1;
  for (const auto & k : kids()) {
    n += k.size();
  }
  return n;
}

std::size_t Expr::depth() const
{
  std::size_t d = 0;
  for (const auto & k : kids()) {
    d = std::max(d, k.depth());
  }
  return d + 1;
}

bool operator==(const Expr & a, const Expr & b)
{
  if (a.node_ == b.node_) {
    return true;
  }
  const ExprNode & x = *a.node_;
  const ExprNode & y = *b.node_;
  if (x.op != y.op || x.kids.size() != y.kids.size()) {
    return false;
  }
  switch (x.op) {
    case Op::BoolLit:
      return x.flag == y.flag;
    case Op::IntLit:
      return x.bits == y.bits && x.lit_type == y.lit_type;
    case Op::Var:
    case Op::Old:
      return x.name == y.name;
    case Op::Select:
      if (x.name != y.name) {
        return false;
      }
      break;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      if (x.flag != y.flag) {
        return false;
      }
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x.kids.size(); ++i) {
    if (x.kids[i] != y.kids[i]) {
      return false;
    }
  }
  return true;
}

Expr operator&&(const Expr & a, const Expr & b)
{
  return Expr::binary(Op::And, a, b);
}
Expr operator||(const Expr & a, const Expr & b)
{
  return Expr::binary(Op::Or, a, b);
}
Expr operator!(const Expr & a) { return Expr::lnot(a); }
Expr eq(const Expr & a, const Expr & b) { return Expr::binary(Op::Eq, a, b); }
Expr neq(const Expr & a, const Expr & b) { return Expr::binary(Op::Neq, a, b); }
Expr implies(const Expr & a, const Expr & b)
{
  return Expr::binary(Op::Implies, a, b);
}
Expr lt_u(const Expr & a, const Expr & b)
{
  return Expr::compare(Op::Lt, a, b, false);
}
Expr le_u(const Expr & a, const Expr & b)
{
  return Expr::compare(Op::Le, a, b, false);
}
Expr gt_u(const Expr & a, const Expr & b)
{
  return Expr::compare(Op::Gt, a, b, false);
}
Expr ge_u(const Expr & a, const Expr & b)
{
  return Expr::compare(Op::Ge, a, b, false);
}
Expr lt_s(const Expr & a, const Expr & b)
{
  return Expr::compare(Op::Lt, a, b, true);
}
Expr add(const Expr & a, const Expr & b) { return Expr::binary(Op::Add, a, b); }
Expr sub(const Expr & a, const Expr & b) { return Expr::binary(Op::Sub, a, b); }
Expr mul(const Expr & a, const Expr & b) { return Expr::binary(Op::Mul, a, b); }

Expr conjunction(const std::vector<Expr> & parts)
{
  if (parts.empty()) {
    return Expr::bool_lit(true);
  }
  Expr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    acc = acc && parts[i];
  }
  return acc;
}

}  // namespace pgv
