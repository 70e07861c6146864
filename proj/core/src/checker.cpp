#include "pgv/checker.hpp"

#include <algorithm>

#include "pgv/codegen.hpp"
#include "pgv/error.hpp"
#include "pgv/il.hpp"

namespace pgv {

namespace {

std::string target(const std::string & prefix, const std::string & var)
{
  return prefix + "__" + var;
}

// Slot symbols of a state copy named by `prefix`.
std::vector<std::string> state_symbols(const VarContext & ctx, const std::string & prefix)
{
  std::vector<std::string> out;
  for (std::size_t s = 0; s < ctx.slots().size(); ++s) {
    out.push_back(smt_slot_symbol(ctx, s, target(prefix, ctx.name(ctx.slots()[s].var))));
  }
  return out;
}

void declare_state(SmtSession & smt, const VarContext & ctx, const std::string & prefix)
{
  auto syms = state_symbols(ctx, prefix);
  for (std::size_t s = 0; s < syms.size(); ++s) {
    smt.declare(syms[s], smt_sort(ctx.slots()[s].type));
  }
}

std::map<std::string, NameBinding> bindings(const VarContext & ctx, const std::string & prefix)
{
  std::map<std::string, NameBinding> out;
  for (const auto & [name, type] : ctx.vars()) {
    out[name] = {target(prefix, name), AccessStyle::Direct};
  }
  return out;
}

NameMap state_map(const VarContext & ctx, const std::string & prefix)
{
  NameMap m;
  m.post = bindings(ctx, prefix);
  return m;
}

NameMap pair_map(const VarContext & ctx, const std::string & pre, const std::string & post)
{
  NameMap m;
  m.pre = bindings(ctx, pre);
  m.post = bindings(ctx, post);
  return m;
}

std::string conj(const std::vector<std::string> & terms)
{
  if (terms.empty()) {
    return "true";
  }
  if (terms.size() == 1) {
    return terms[0];
  }
  std::string out = "(and";
  for (const auto & t : terms) {
    out += " " + t;
  }
  return out + ")";
}

std::string disj(const std::vector<std::string> & terms)
{
  if (terms.empty()) {
    return "false";
  }
  if (terms.size() == 1) {
    return terms[0];
  }
  std::string out = "(or";
  for (const auto & t : terms) {
    out += " " + t;
  }
  return out + ")";
}

unsigned bits_for(std::size_t n)
{
  unsigned w = 1;
  while ((std::size_t{1} << w) < n) {
    ++w;
  }
  return w;
}

// Encodes one call's contract relation plus the frame rule.
std::string call_relation(const AbstractModel & a, const std::string & proc,
                          const std::string & pre, const std::string & post)
{
  const VarContext & ctx = *a.model.vars;
  const Contract & c = a.contracts.at(proc);
  NameMap m = pair_map(ctx, pre, post);
  std::vector<std::string> parts;
  parts.push_back("(=> " + compile_to_smt(c.pre, ctx, state_map(ctx, pre)) + " "
                  + compile_to_smt(c.post, ctx, m) + ")");
  auto footprint = a.model.procedure(proc).vars();
  auto pre_syms = state_symbols(ctx, pre);
  auto post_syms = state_symbols(ctx, post);
  for (std::size_t s = 0; s < ctx.slots().size(); ++s) {
    if (!footprint.count(ctx.name(ctx.slots()[s].var))) {
      parts.push_back("(= " + post_syms[s] + " " + pre_syms[s] + ")");
    }
  }
  return conj(parts);
}

std::string call_prefix(std::size_t step, std::size_t t, std::size_t j)
{
  return "c" + std::to_string(step) + "_" + std::to_string(t) + "_" + std::to_string(j);
}

// Prefix of the state before call j (j = 0 .. k) of transition t at a step.
std::string chain_state(std::size_t step, std::size_t t, std::size_t j, std::size_t k)
{
  if (j == 0) {
    return "v" + std::to_string(step);
  }
  if (j == k) {
    return "v" + std::to_string(step + 1);
  }
  return call_prefix(step, t, j);
}

void assert_state_values(SmtSession & smt, const VarContext & ctx, const std::string & prefix,
                         const Assignment & a)
{
  auto syms = state_symbols(ctx, prefix);
  for (std::size_t s = 0; s < syms.size(); ++s) {
    smt.assert_term("(= " + syms[s] + " " + smt_value(ctx.slots()[s].type, a.slot(s)) + ")");
  }
}

// Incremental unrolling of the abstract model.
class Unroller
{
 public:
  Unroller(const AbstractModel & a, const Property & p, SmtSession & smt)
      : a_(a), m_(a.model), ctx_(*m_.vars), pc_(m_.property_context()), smt_(smt)
  {
    mode_w_ = bits_for(m_.modes.size());
    sel_w_ = bits_for(m_.transitions.size() + 1);
    pred_ = p.predicate;
  }

  std::string mode_sym(std::size_t i) const { return "mode_" + std::to_string(i); }
  std::string time_sym(std::size_t i) const { return "time_" + std::to_string(i); }
  std::string sel_sym(std::size_t i) const { return "sel_" + std::to_string(i); }
  std::string pred_sym(std::size_t i) const { return "p_" + std::to_string(i); }
  std::string maximal_sym(std::size_t i) const { return "max_" + std::to_string(i); }
  std::string en_sym(std::size_t i, std::size_t t) const
  {
    return "en_" + std::to_string(i) + "_" + std::to_string(t);
  }

  std::string mode_is(std::size_t i, int idx) const
  {
    return "(= " + mode_sym(i) + " " + smt_value(SemType::uint(mode_w_), static_cast<uint64_t>(idx)) + ")";
  }

  std::string time_lit(uint64_t t) const { return smt_value(SemType::uint(64), t); }

  void init()
  {
    declare_step(0);
    smt_.assert_term(mode_is(0, m_.mode_index(m_.init.mode)));
    smt_.assert_term("(= " + time_sym(0) + " " + time_lit(0) + ")");
    smt_.assert_term(compile_to_smt(m_.init.predicate, ctx_, state_map(ctx_, "v0")));
  }

  // Adds step i -> i + 1 (state i + 1 declared here).
  void extend(std::size_t i)
  {
    declare_step(i + 1);
    smt_.declare(sel_sym(i), smt_sort(SemType::uint(sel_w_)));
    smt_.assert_term("(bvult " + sel_sym(i) + " "
                     + smt_value(SemType::uint(sel_w_), m_.transitions.size()) + ")");
    for (std::size_t t = 0; t < m_.transitions.size(); ++t) {
      const Transition & tr = m_.transitions[t];
      std::size_t k = tr.update.size();
      for (std::size_t j = 1; j < k; ++j) {
        declare_state(smt_, ctx_, call_prefix(i, t, j));
      }
      std::vector<std::string> body{en_sym(i, t), mode_is(i + 1, m_.mode_index(tr.to)),
                                    "(= " + time_sym(i + 1) + " (bvadd " + time_sym(i) + " "
                                        + time_lit(tr.duration) + "))"};
      if (k == 0) {
        auto a = state_symbols(ctx_, "v" + std::to_string(i));
        auto b = state_symbols(ctx_, "v" + std::to_string(i + 1));
        for (std::size_t s = 0; s < a.size(); ++s) {
          body.push_back("(= " + b[s] + " " + a[s] + ")");
        }
      }
      for (std::size_t j = 0; j < k; ++j) {
        body.push_back(call_relation(a_, tr.update[j], chain_state(i, t, j, k),
                                     chain_state(i, t, j + 1, k)));
      }
      smt_.assert_term("(=> (= " + sel_sym(i) + " " + smt_value(SemType::uint(sel_w_), t) + ") "
                       + conj(body) + ")");
    }
  }

  // Reads a path of `depth` transitions from the current model.
  Trace read_trace(std::size_t depth)
  {
    Trace tr;
    std::vector<std::string> terms;
    for (std::size_t i = 0; i <= depth; ++i) {
      terms.push_back(mode_sym(i));
      terms.push_back(time_sym(i));
      if (i < depth) {
        terms.push_back(sel_sym(i));
      }
    }
    auto head = smt_.get_bits(terms);
    std::size_t at = 0;
    std::vector<uint64_t> sel;
    for (std::size_t i = 0; i <= depth; ++i) {
      TraceStep s;
      s.mode = m_.modes.at(head[at++]);
      s.time = head[at++];
      if (i < depth) {
        sel.push_back(head[at++]);
      }
      s.state = Assignment(m_.vars, smt_.get_bits(state_symbols(ctx_, "v" + std::to_string(i))));
      tr.steps.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < depth; ++i) {
      const Transition & t = m_.transitions.at(sel[i]);
      TraceStep & next = tr.steps[i + 1];
      next.transition = t.id;
      std::size_t k = t.update.size();
      std::vector<Assignment> chain{tr.steps[i].state};
      for (std::size_t j = 1; j < k; ++j) {
        chain.emplace_back(m_.vars, smt_.get_bits(state_symbols(ctx_, call_prefix(i, sel[i], j))));
      }
      chain.push_back(next.state);
      for (std::size_t j = 0; j < k; ++j) {
        next.calls.push_back({t.update[j], chain[j], chain[j + 1]});
      }
    }
    bool maximal = smt_.get_bits({maximal_sym(depth)})[0] != 0;
    tr.maximal = maximal;
    tr.stuck = maximal && !m_.terminal.count(tr.steps.back().mode);
    return tr;
  }

 private:
  void declare_step(std::size_t i)
  {
    smt_.declare(mode_sym(i), smt_sort(SemType::uint(mode_w_)));
    smt_.declare(time_sym(i), smt_sort(SemType::uint(64)));
    std::string v = "v" + std::to_string(i);
    declare_state(smt_, ctx_, v);

    // mode.<m> flags for the property context
    std::string mrec = "m" + std::to_string(i);
    NameMap pm = state_map(ctx_, v);
    auto midx = pc_->index_of("mode");
    for (std::size_t s = 0; s < pc_->slots().size(); ++s) {
      const Slot & sl = pc_->slots()[s];
      if (midx && sl.var == *midx) {
        std::string sym = smt_slot_symbol(*pc_, s, target(mrec, "mode"));
        smt_.declare(sym, "Bool");
        smt_.assert_term("(= " + sym + " " + mode_is(i, sl.fields.at(0)) + ")");
      }
    }
    pm.post["mode"] = {target(mrec, "mode"), AccessStyle::Direct};
    smt_.declare(pred_sym(i), "Bool");
    smt_.assert_term("(= " + pred_sym(i) + " " + compile_to_smt(pred_, *pc_, pm) + ")");

    std::vector<std::string> ens;
    for (std::size_t t = 0; t < m_.transitions.size(); ++t) {
      const Transition & tr = m_.transitions[t];
      smt_.declare(en_sym(i, t), "Bool");
      smt_.assert_term("(= " + en_sym(i, t) + " (and " + mode_is(i, m_.mode_index(tr.from)) + " "
                       + compile_to_smt(tr.guard, ctx_, pm) + "))");
      ens.push_back(en_sym(i, t));
    }
    smt_.declare(maximal_sym(i), "Bool");
    smt_.assert_term("(= " + maximal_sym(i) + " (not " + disj(ens) + "))");
  }

  const AbstractModel & a_;
  const PolyglotModel & m_;
  const VarContext & ctx_;
  ContextPtr pc_;
  SmtSession & smt_;
  Expr pred_;
  unsigned mode_w_ = 1, sel_w_ = 1;
};

}  // namespace

CompositionResult check_composition(const std::vector<Contract> & chain, const ContextPtr & ctx,
                                    const SolverConfig & solver)
{
  CompositionResult r;
  if (chain.size() < 2) {
    return r;
  }
  SmtSession smt(solver);
  declare_state(smt, *ctx, "a");
  declare_state(smt, *ctx, "b");
  for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
    smt.push();
    smt.assert_term(compile_to_smt(chain[j].post, *ctx, pair_map(*ctx, "a", "b")));
    smt.assert_term("(not " + compile_to_smt(chain[j + 1].pre, *ctx, state_map(*ctx, "b")) + ")");
    SatResult res = smt.check_sat();
    if (res == SatResult::Sat) {
      r.ok = false;
      r.junction = j;
      r.witness = Assignment(ctx, smt.get_bits(state_symbols(*ctx, "b")));
      return r;
    }
    if (res == SatResult::Unknown) {
      throw SolverError("solver returned unknown on a composition check");
    }
    smt.pop();
  }
  return r;
}

bool AbstractModel::call_admits(const std::string & procedure, const Assignment & d,
                                const Assignment & d2) const
{
  const Contract & c = contracts.at(procedure);
  if (holds_pre(c.pre, d) && !holds_post(c.post, d, d2)) {
    return false;
  }
  auto footprint = model.procedure(procedure).vars();
  const VarContext & ctx = *model.vars;
  for (std::size_t s = 0; s < ctx.slots().size(); ++s) {
    if (!footprint.count(ctx.name(ctx.slots()[s].var)) && d.slot(s) != d2.slot(s)) {
      return false;
    }
  }
  return true;
}

AbstractModel induce(const PolyglotModel & m, const ContractTable & contracts,
                     const SolverConfig & solver)
{
  AbstractModel a{m, {}};
  for (const auto & [name, proc] : m.procedures) {
    auto it = contracts.find(name);
    if (it == contracts.end()) {
      bool used = false;
      for (const auto & t : m.transitions) {
        used = used || std::find(t.update.begin(), t.update.end(), name) != t.update.end();
      }
      if (used) {
        throw CompositionFailure("no contract for procedure '" + name + "'");
      }
      continue;
    }
    check_contract(it->second, *m.vars);
    a.contracts[name] = it->second;
  }
  for (const auto & t : m.transitions) {
    std::vector<Contract> chain;
    for (const auto & p : t.update) {
      chain.push_back(a.contracts.at(p));
    }
    CompositionResult r = check_composition(chain, m.vars, solver);
    if (!r.ok) {
      throw CompositionFailure("transition '" + t.id + "': postcondition of " + t.update[r.junction]
                               + " does not imply the precondition of " + t.update[r.junction + 1]
                               + " (e.g. at " + r.witness->str() + ")");
    }
  }
  return a;
}

bool admits_step(const AbstractModel & a, const Transition & t, const Assignment & from,
                 const Assignment & to, const SolverConfig & solver)
{
  const VarContext & ctx = *a.model.vars;
  if (!holds_pre(t.guard, from)) {
    return false;
  }
  std::size_t k = t.update.size();
  if (k == 0) {
    return from == to;
  }
  SmtSession smt(solver);
  for (std::size_t j = 0; j <= k; ++j) {
    declare_state(smt, ctx, chain_state(0, 0, j, k));
  }
  assert_state_values(smt, ctx, "v0", from);
  assert_state_values(smt, ctx, "v1", to);
  for (std::size_t j = 0; j < k; ++j) {
    smt.assert_term(call_relation(a, t.update[j], chain_state(0, 0, j, k), chain_state(0, 0, j + 1, k)));
  }
  SatResult r = smt.check_sat();
  if (r == SatResult::Unknown) {
    throw SolverError("solver returned unknown on a step query");
  }
  return r == SatResult::Sat;
}

McResult bmc(const AbstractModel & a, const Property & p, std::size_t bound,
             const SolverConfig & solver)
{
  if (bound < 1) {
    throw PgvError("the BMC bound must be at least 1");
  }
  McResult res;
  try {
    SmtSession smt(solver);
    Unroller u(a, p, smt);
    u.init();
    auto check = [&]() {
      SatResult r = smt.check_sat();
      if (r == SatResult::Unknown) {
        throw SolverError("solver returned unknown");
      }
      return r == SatResult::Sat;
    };

    if (p.kind == PropertyKind::Invariant) {
      for (std::size_t k = 0;; ++k) {
        smt.push();
        smt.assert_term("(not " + u.pred_sym(k) + ")");
        if (check()) {
          res.verdict = McVerdict::Fail;
          res.trace = u.read_trace(k);
          return res;
        }
        smt.pop();
        if (k == bound) {
          break;
        }
        u.extend(k);
      }
      res.bound = bound;
      return res;
    }

    std::string T = u.time_lit(p.within);
    std::optional<Trace> best;
    uint64_t best_time = 0;
    for (std::size_t k = 0;; ++k) {
      std::string overshoot = "(bvugt " + u.time_sym(k) + " " + T + ")";
      smt.push();
      smt.assert_term("(or " + overshoot + " (and " + u.maximal_sym(k) + " (not " + u.pred_sym(k) + ")))");
      if (best) {
        smt.assert_term("(bvugt " + u.time_sym(k) + " " + u.time_lit(best_time) + ")");
      }
      while (check()) {
        best = u.read_trace(k);
        best_time = best->steps.back().time;
        smt.assert_term("(bvugt " + u.time_sym(k) + " " + u.time_lit(best_time) + ")");
      }
      smt.pop();
      if (k == bound) {
        if (!best) {
          smt.push();
          smt.assert_term("(not " + u.pred_sym(k) + ")");
          smt.assert_term("(not " + overshoot + ")");
          smt.assert_term("(not " + u.maximal_sym(k) + ")");
          if (check()) {
            res.warnings.push_back("some paths reach the bound of " + std::to_string(bound)
                                   + " steps before time " + std::to_string(p.within)
                                   + " without a witness; the verdict covers only " + std::to_string(bound)
                                   + " steps");
          }
          smt.pop();
        }
        break;
      }
      smt.assert_term("(not " + u.pred_sym(k) + ")");
      u.extend(k);
    }
    if (best) {
      res.verdict = McVerdict::Fail;
      res.trace = std::move(*best);
      return res;
    }
    res.bound = bound;
    return res;
  } catch (const SolverTimeout & e) {
    res.verdict = McVerdict::Unknown;
    res.reason = std::string("timeout: ") + e.what();
    return res;
  }
}

std::map<std::string, std::vector<ExamplePair>> extract(const Trace & t)
{
  std::map<std::string, std::vector<ExamplePair>> out;
  for (const auto & s : t.steps) {
    for (const auto & c : s.calls) {
      ExamplePair x{c.pre, c.post, Polarity::Negative};
      auto & v = out[c.procedure];
      if (std::find(v.begin(), v.end(), x) == v.end()) {
        v.push_back(std::move(x));
      }
    }
  }
  return out;
}

}  // namespace pgv
