#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pgv/types.hpp"

namespace pgv {

enum class Op
{
  BoolLit,
  IntLit,
  Var,
  Old,
  Select,
  Not,
  And,
  Or,
  Implies,
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Ite
};

bool is_comparison(Op op);  // Lt, Le, Gt, Ge
bool is_arith(Op op);       // Add, Sub, Mul
bool is_bool_connective(Op op);  // And, Or, Implies

class Expr;

struct ExprNode
{
  Op op = Op::BoolLit;
  bool flag = false;  // BoolLit value, or signedness of a comparison
  uint64_t bits = 0;  // IntLit payload
  SemType lit_type;   // IntLit type
  std::string name;   // Var/Old variable, Select field
  std::vector<Expr> kids;
};

/// Immutable, shared expression tree of the contract language. Equality is
/// structural.
class Expr
{
 public:
  Expr();  // BoolLit(true)

  static Expr bool_lit(bool b);
  static Expr int_lit(const SemType & type, uint64_t bits);
  static Expr uint_lit(unsigned width, uint64_t v)
  {
    return int_lit(SemType::uint(width), v);
  }
  static Expr sint_lit(unsigned width, int64_t v)
  {
    return int_lit(SemType::sint(width), static_cast<uint64_t>(v));
  }
  static Expr var(std::string name);
  static Expr old(std::string name);
  static Expr select(Expr record, std::string field);
  static Expr lnot(Expr e);
  static Expr binary(Op op, Expr a, Expr b);
  /// Lt/Le/Gt/Ge with explicit signedness.
  static Expr compare(Op op, Expr a, Expr b, bool is_signed);
  static Expr ite(Expr c, Expr t, Expr e);

  Op op() const { return node_->op; }
  bool bool_value() const { return node_->flag; }
  bool is_signed_cmp() const { return node_->flag; }
  uint64_t lit_bits() const { return node_->bits; }
  const SemType & lit_type() const { return node_->lit_type; }
  const std::string & name() const { return node_->name; }
  const std::vector<Expr> & kids() const { return node_->kids; }
  const Expr & kid(std::size_t i) const { return node_->kids[i]; }

  bool is_true() const { return op() == Op::BoolLit && bool_value(); }
  bool is_false() const { return op() == Op::BoolLit && !bool_value(); }

  /// Number of AST nodes.
  std::size_t size() const;
  std::size_t depth() const;

  friend bool operator==(const Expr & a, const Expr & b);
  friend bool operator!=(const Expr & a, const Expr & b) { return !(a == b); }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

// Convenience builders.
Expr operator&&(const Expr & a, const Expr & b);
Expr operator||(const Expr & a, const Expr & b);
Expr operator!(const Expr & a);
Expr eq(const Expr & a, const Expr & b);
Expr neq(const Expr & a, const Expr & b);
Expr implies(const Expr & a, const Expr & b);
Expr lt_u(const Expr & a, const Expr & b);
Expr le_u(const Expr & a, const Expr & b);
Expr gt_u(const Expr & a, const Expr & b);
Expr ge_u(const Expr & a, const Expr & b);
Expr lt_s(const Expr & a, const Expr & b);
Expr add(const Expr & a, const Expr & b);
Expr sub(const Expr & a, const Expr & b);
Expr mul(const Expr & a, const Expr & b);
/// Left-associated conjunction; `true` when empty.
Expr conjunction(const std::vector<Expr> & parts);

enum class Position
{
  Pre,   // only pre-state; old(...) forbidden
  Post   // Var = post-state, old(v) = pre-state
};

/// Pre/post predicate pair. Both sides are Bool-typed over one context; the
/// precondition contains no old(...).
struct Contract
{
  Expr pre = Expr::bool_lit(true);
  Expr post = Expr::bool_lit(true);

  friend bool operator==(const Contract & a, const Contract & b)
  {
    return a.pre == b.pre && a.post == b.post;
  }
};

}  // namespace pgv
