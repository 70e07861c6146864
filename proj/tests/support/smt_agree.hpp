#pragma once

// Interpreter vs solver evaluation of compile_to_smt output. One check-sat
// per assignment pair; all terms are read back with a single get-value.

#include <string>
#include <vector>

#include "pgv/codegen.hpp"
#include "pgv/il.hpp"
#include "pgv/smt.hpp"
#include "support/random_expr.hpp"

namespace pgv::testgen {

struct Agreement
{
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

inline Agreement smt_agreement(SmtSession & s, const ContextPtr & ctx, const std::vector<Expr> & es,
                               std::size_t assignments, ExprGen & g)
{
  NameMap nm = NameMap::identity(*ctx);
  const VarContext & c = *ctx;
  s.push();
  for (std::size_t i = 0; i < c.slots().size(); ++i) {
    std::string sort = smt_sort(c.slots()[i].type);
    const std::string & v = c.name(c.slots()[i].var);
    s.declare(smt_slot_symbol(c, i, v), sort);
    s.declare(smt_slot_symbol(c, i, "old_" + v), sort);
  }
  std::vector<std::string> terms;
  for (const auto & e : es) {
    terms.push_back(compile_to_smt(e, c, nm));
  }
  Agreement a;
  for (std::size_t j = 0; j < assignments; ++j) {
    Assignment pre = g.random_assignment(ctx), post = g.random_assignment(ctx);
    s.push();
    for (std::size_t i = 0; i < c.slots().size(); ++i) {
      const auto & sl = c.slots()[i];
      const std::string & v = c.name(sl.var);
      s.assert_term("(= " + smt_slot_symbol(c, i, v) + " " + smt_value(sl.type, post.slot(i)) + ")");
      s.assert_term("(= " + smt_slot_symbol(c, i, "old_" + v) + " " + smt_value(sl.type, pre.slot(i)) + ")");
    }
    if (s.check_sat() != SatResult::Sat) {
      s.pop();
      a.mismatches += es.size();
      a.first_mismatch = "assignment constraints unsatisfiable";
      continue;
    }
    std::vector<uint64_t> got = s.get_bits(terms);
    s.pop();
    for (std::size_t k = 0; k < es.size(); ++k) {
      ++a.cases;
      if ((got[k] != 0) != holds_post(es[k], pre, post)) {
        if (a.mismatches++ == 0) {
          a.first_mismatch = pretty_print(es[k]);
        }
      }
    }
  }
  s.pop();
  return a;
}

}  // namespace pgv::testgen
