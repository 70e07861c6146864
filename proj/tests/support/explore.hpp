#pragma once

// Exhaustive concrete search over small all-mini models, and exact contract
// relations of mini procedures. Independent of the SMT encoding.

#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "pgv/il.hpp"
#include "pgv/minilang.hpp"
#include "pgv/model.hpp"

namespace pgv::testgen {

/// Every assignment of the scalar slots of `ctx` (small contexts only).
inline std::vector<Assignment> all_states(const ContextPtr & ctx)
{
  std::vector<Assignment> out{Assignment(ctx)};
  for (std::size_t s = 0; s < ctx->slots().size(); ++s) {
    uint64_t n = ctx->slots()[s].type.mask() + 1;
    std::vector<Assignment> next;
    for (const auto & a : out) {
      for (uint64_t v = 0; v < n; ++v) {
        Assignment b = a;
        b.set_slot(s, v);
        next.push_back(b);
      }
    }
    out = std::move(next);
  }
  return out;
}

struct Successor
{
  std::size_t transition;
  Assignment state;
};

/// All concrete successors of (mode, state).
inline std::vector<Successor> successors(const PolyglotModel & m, const std::string & mode,
                                         const Assignment & state)
{
  std::vector<Successor> out;
  for (std::size_t t = 0; t < m.transitions.size(); ++t) {
    const Transition & tr = m.transitions[t];
    if (tr.from != mode || !holds_pre(tr.guard, state)) {
      continue;
    }
    std::set<Assignment> cur{state};
    for (const auto & p : tr.update) {
      std::set<Assignment> next;
      for (const auto & a : cur) {
        for (const auto & b : exec_mini(*m.procedure(p).mini, a)) {
          next.insert(b);
        }
      }
      cur = std::move(next);
    }
    for (const auto & b : cur) {
      out.push_back({t, b});
    }
  }
  return out;
}

/// Whether some concrete path of at most `k` transitions violates `p`
/// (same violation notion as holds(): an Invariant state failing, or for
/// EventuallyWithin a step past the deadline or a maximal state before any
/// witness).
inline bool concrete_violation(const PolyglotModel & m, const Property & p, std::size_t k)
{
  ContextPtr pc = m.property_context();
  auto pred = [&](const std::string & mode, const Assignment & s) {
    return holds_pre(p.predicate, property_state(m, pc, mode, s));
  };
  std::set<std::tuple<std::string, Assignment, uint64_t, std::size_t>> seen;
  std::function<bool(const std::string &, const Assignment &, uint64_t, std::size_t)> go =
      [&](const std::string & mode, const Assignment & s, uint64_t time, std::size_t depth) {
        if (!seen.insert({mode, s, time, depth}).second) {
          return false;
        }
        auto succ = successors(m, mode, s);
        if (p.kind == PropertyKind::Invariant) {
          if (!pred(mode, s)) {
            return true;
          }
        } else {
          if (time > p.within) {
            return true;
          }
          if (pred(mode, s)) {
            return false;
          }
          if (succ.empty()) {
            return true;
          }
        }
        if (depth == k) {
          return false;
        }
        for (const auto & n : succ) {
          const Transition & tr = m.transitions[n.transition];
          if (go(tr.to, n.state, time + tr.duration, depth + 1)) {
            return true;
          }
        }
        return false;
      };
  for (const auto & s : all_states(m.vars)) {
    if (holds_pre(m.init.predicate, s) && go(m.init.mode, s, 0, 0)) {
      return true;
    }
  }
  return false;
}

/// Leaf term of slot `s` below its variable.
inline Expr slot_leaf(const VarContext & ctx, std::size_t s, bool old)
{
  const Slot & sl = ctx.slots()[s];
  Expr e = old ? Expr::old(ctx.name(sl.var)) : Expr::var(ctx.name(sl.var));
  const SemType * t = &ctx.type(sl.var);
  for (int fi : sl.fields) {
    const Field & f = t->fields()[static_cast<std::size_t>(fi)];
    e = Expr::select(e, f.name);
    t = &f.type;
  }
  return e;
}

/// (true, Q) where Q is exactly the input/output relation of a mini
/// procedure over its footprint.
inline Contract exact_contract(const ProcedureRef & f, const ContextPtr & ctx)
{
  auto fp = f.vars();
  std::vector<std::size_t> slots;
  for (std::size_t s = 0; s < ctx->slots().size(); ++s) {
    if (fp.count(ctx->name(ctx->slots()[s].var))) {
      slots.push_back(s);
    }
  }
  auto match = [&](const Assignment & a, bool old) {
    Expr e = Expr::bool_lit(true);
    bool first = true;
    for (std::size_t s : slots) {
      const SemType & t = ctx->slots()[s].type;
      Expr lit = t.is_bool() ? Expr::bool_lit(a.slot(s) != 0) : Expr::int_lit(t, a.slot(s));
      Expr eq = Expr::binary(Op::Eq, slot_leaf(*ctx, s, old), lit);
      e = first ? eq : Expr::binary(Op::And, e, eq);
      first = false;
    }
    return e;
  };
  std::set<Assignment> pres;
  for (const auto & a : all_states(ctx)) {
    Assignment d(ctx);
    for (std::size_t s : slots) {
      d.set_slot(s, a.slot(s));
    }
    pres.insert(d);
  }
  Expr q = Expr::bool_lit(false);
  bool first = true;
  for (const auto & d : pres) {
    Expr posts = Expr::bool_lit(false);
    bool pf = true;
    for (const auto & b : exec_mini(*f.mini, d)) {
      Expr mb = match(b, false);
      posts = pf ? mb : Expr::binary(Op::Or, posts, mb);
      pf = false;
    }
    Expr row = Expr::binary(Op::And, match(d, true), posts);
    q = first ? row : Expr::binary(Op::Or, q, row);
    first = false;
  }
  return {Expr::bool_lit(true), q};
}

}  // namespace pgv::testgen
