#pragma once

#include <cstdint>
#include <vector>

#include "pgv/expr.hpp"
#include "pgv/types.hpp"

namespace pgv {

/// Stack-machine form of an expression over flat slot vectors. Used in the
/// enumeration loops where the tree interpreter is too slow; agrees with
/// eval() on every well-typed scalar expression.
class CompiledExpr
{
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr & e, const VarContext & ctx, Position pos);

  /// Result bits (0/1 for Bool). In pre position `post` may be null.
  uint64_t run(const uint64_t * pre, const uint64_t * post) const;

  bool test(const uint64_t * pre, const uint64_t * post) const
  {
    return run(pre, post) != 0;
  }
  bool test(const Assignment & pre, const Assignment & post) const
  {
    return run(pre.slots().data(), post.slots().data()) != 0;
  }
  bool test(const Assignment & pre) const
  {
    return run(pre.slots().data(), nullptr) != 0;
  }

  enum class Code : uint8_t
  {
    LoadPre,
    LoadPost,
    Const,
    Not,
    And,
    Or,
    Implies,
    Eq,
    Neq,
    LtU,
    LeU,
    GtU,
    GeU,
    LtS,
    LeS,
    GtS,
    GeS,
    Add,
    Sub,
    Mul,
    Ite
  };

  struct Instr
  {
    Code code;
    unsigned width = 0;  // arithmetic / signed comparison width
    uint64_t arg = 0;    // slot index, constant, or mask
  };

 private:
  void emit(const Expr & e, const VarContext & ctx, Position pos, int depth);

  std::vector<Instr> code_;
  int max_depth_ = 0;
};

}  // namespace pgv
