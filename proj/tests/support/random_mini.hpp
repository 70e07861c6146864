#pragma once

// Random loop-free mini procedures over scalar contexts.

#include <random>

#include "pgv/minilang.hpp"
#include "support/random_expr.hpp"

namespace pgv::testgen {

class MiniGen
{
 public:
  MiniGen(ContextPtr ctx, uint64_t seed) : ctx_(std::move(ctx)), exprs_(*ctx_, seed), rng_(seed ^ 0x5bd1e995) {}

  MiniProc gen(const std::string & name, int max_stmts = 3, int depth = 2)
  {
    MiniProc p;
    p.name = name;
    p.ctx = ctx_;
    p.body = block(max_stmts, depth);
    return p;
  }

  ExprGen & exprs() { return exprs_; }

 private:
  std::size_t pick(std::size_t n)
  {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  std::vector<MiniStmt> block(int max_stmts, int depth)
  {
    std::vector<MiniStmt> out;
    int n = static_cast<int>(pick(static_cast<std::size_t>(max_stmts) + 1));
    for (int i = 0; i < n; ++i) {
      out.push_back(stmt(depth));
    }
    return out;
  }

  MiniStmt stmt(int depth)
  {
    MiniStmt s;
    std::size_t v = pick(ctx_->size());
    const SemType & t = ctx_->type(v);
    switch (pick(depth > 0 ? 4 : 3)) {
      case 0:
        s.kind = MiniStmt::Kind::Havoc;
        s.var = ctx_->name(v);
        if (t.is_integer() && pick(2) == 0) {
          uint64_t a = exprs_.rng()() & t.mask();
          uint64_t b = exprs_.rng()() & t.mask();
          bool le = t.is_signed() ? sign_extend(a, t.width()) <= sign_extend(b, t.width()) : a <= b;
          s.range = le ? std::make_pair(a, b) : std::make_pair(b, a);
        }
        return s;
      case 3:
        s.kind = MiniStmt::Kind::If;
        s.cond = exprs_.gen(SemType::boolean(), 2, false);
        s.then_body = block(2, depth - 1);
        s.else_body = block(2, depth - 1);
        return s;
      default:
        s.kind = MiniStmt::Kind::Assign;
        s.var = ctx_->name(v);
        s.rhs = exprs_.gen(t, 2, false);
        return s;
    }
  }

  ContextPtr ctx_;
  ExprGen exprs_;
  std::mt19937_64 rng_;
};

}  // namespace pgv::testgen
