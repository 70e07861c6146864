#include "pgv/model.hpp"

#include <algorithm>
#include <sstream>

#include "pgv/error.hpp"
#include "pgv/il.hpp"

namespace pgv {

std::string to_string(Language l)
{
  switch (l) {
    case Language::Mini: return "mini";
    case Language::C: return "c";
    case Language::Rust: return "rust";
  }
  return "?";
}

Language parse_language(const std::string & s)
{
  if (s == "mini") {
    return Language::Mini;
  }
  if (s == "c" || s == "C") {
    return Language::C;
  }
  if (s == "rust") {
    return Language::Rust;
  }
  throw ModelError("unknown procedure language '" + s + "'");
}

std::set<std::string> ProcedureRef::vars() const
{
  std::set<std::string> out = reads;
  out.insert(writes.begin(), writes.end());
  for (const auto & iv : interface) {
    out.insert(iv.var);
  }
  return out;
}

const ProcedureRef & PolyglotModel::procedure(const std::string & name) const
{
  auto it = procedures.find(name);
  if (it == procedures.end()) {
    throw ModelError("unknown procedure '" + name + "'");
  }
  return it->second;
}

int PolyglotModel::mode_index(const std::string & mode) const
{
  auto it = std::find(modes.begin(), modes.end(), mode);
  return it == modes.end() ? -1 : static_cast<int>(it - modes.begin());
}

ContextPtr PolyglotModel::property_context() const
{
  std::vector<Field> fields;
  for (const auto & m : modes) {
    fields.push_back({m, SemType::boolean()});
  }
  auto vars_copy = vars->vars();
  if (vars->contains("mode")) {
    throw ModelError("variable name 'mode' is reserved");
  }
  vars_copy.emplace_back("mode", SemType::record(std::move(fields)));
  return make_context(std::move(vars_copy));
}

std::vector<std::string> PolyglotModel::procedure_order() const
{
  std::vector<std::string> out;
  for (const auto & t : transitions) {
    for (const auto & p : t.update) {
      if (std::find(out.begin(), out.end(), p) == out.end()) {
        out.push_back(p);
      }
    }
  }
  for (const auto & [name, p] : procedures) {
    if (std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(name);
    }
  }
  return out;
}

std::string Property::str() const
{
  if (kind == PropertyKind::Invariant) {
    return "G(" + pretty_print(predicate) + ")";
  }
  return "F[0," + std::to_string(within) + "](" + pretty_print(predicate) + ")";
}

Property parse_property(const PolyglotModel & m, const std::string & kind,
                        uint64_t within, const std::string & predicate)
{
  Property p;
  if (kind == "invariant") {
    p.kind = PropertyKind::Invariant;
  } else if (kind == "eventually_within") {
    p.kind = PropertyKind::EventuallyWithin;
    p.within = within;
  } else {
    throw ModelError("unknown property kind '" + kind
                     + "' (expected invariant or eventually_within)");
  }
  p.predicate = parse_predicate(predicate, *m.property_context(), Position::Pre);
  return p;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Diagnostic> validate_model(const PolyglotModel & m)
{
  std::vector<Diagnostic> out;
  auto diag = [&](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };
  if (!m.vars || m.vars->empty()) {
    diag("NoVariables", "the model declares no variables");
    return out;
  }
  if (m.vars->contains("mode")) {
    diag("ReservedName", "variable name 'mode' is reserved for properties");
  }
  std::set<std::string> seen_modes;
  for (const auto & md : m.modes) {
    if (!seen_modes.insert(md).second) {
      diag("DuplicateMode", "mode '" + md + "' declared twice");
    }
  }
  if (m.mode_index(m.init.mode) < 0) {
    diag("UnknownMode", "initial mode '" + m.init.mode + "' is not declared");
  }
  for (const auto & t : m.terminal) {
    if (m.mode_index(t) < 0) {
      diag("UnknownMode", "terminal mode '" + t + "' is not declared");
    }
  }
  try {
    SemType it = typecheck(m.init.predicate, *m.vars, Position::Pre);
    if (!it.is_bool()) {
      diag("TypeError", "initial predicate is not Bool");
    }
  } catch (const OldInPrecondition &) {
    diag("OldInInit", "initial predicate uses old(...)");
  } catch (const IlError & e) {
    diag("TypeError", std::string("initial predicate: ") + e.what());
  }
  if (m.transitions.empty() && m.terminal.empty()) {
    diag("NoTransitions", "the model has no transitions and no terminal mode");
  }
  std::set<std::string> ids;
  for (const auto & t : m.transitions) {
    std::string where = "transition '" + t.id + "'";
    if (!ids.insert(t.id).second) {
      diag("DuplicateTransition", where + " declared twice");
    }
    if (m.mode_index(t.from) < 0) {
      diag("UnknownMode", where + ": source mode '" + t.from + "' is not declared");
    }
    if (m.mode_index(t.to) < 0) {
      diag("UnknownMode", where + ": target mode '" + t.to + "' is not declared");
    }
    if (m.terminal.count(t.from)) {
      diag("TerminalHasTransitions", where + " leaves terminal mode '" + t.from + "'");
    }
    if (t.update.empty()) {
      diag("EmptyUpdate", where + " has no procedures");
    }
    for (const auto & p : t.update) {
      if (!m.procedures.count(p)) {
        diag("UnknownProcedure", where + " calls unknown procedure '" + p + "'");
      }
    }
    try {
      SemType g = typecheck(t.guard, *m.vars, Position::Pre);
      if (!g.is_bool()) {
        diag("TypeError", where + ": guard is not Bool");
      }
    } catch (const OldInPrecondition &) {
      diag("OldInGuard", where + ": guard uses old(...)");
    } catch (const IlError & e) {
      diag("TypeError", where + ": " + e.what());
    }
  }
  for (const auto & [name, p] : m.procedures) {
    std::string where = "procedure '" + name + "'";
    for (const auto & v : p.vars()) {
      if (!m.vars->contains(v)) {
        diag("UnknownVariable", where + " uses undeclared variable '" + v + "'");
      }
    }
    if (p.language == Language::Mini && !p.mini) {
      diag("ProcedureError", where + " has no parsed mini body");
    }
    if (p.language != Language::Mini && p.source.empty()) {
      diag("ProcedureError", where + " has no source");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schedulers

std::size_t SeededScheduler::choose_transition(std::size_t n)
{
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

uint64_t SeededScheduler::choose_value(uint64_t n)
{
  if (n == 0) {
    return rng_();
  }
  return std::uniform_int_distribution<uint64_t>(0, n - 1)(rng_);
}

uint64_t SeededScheduler::choose_init(uint64_t n)
{
  return choose_value(n);
}

std::size_t ScriptedScheduler::choose_transition(std::size_t n)
{
  std::size_t c = ti_ < transitions_.size() ? transitions_[ti_++] : 0;
  return n ? c % n : 0;
}

uint64_t ScriptedScheduler::choose_value(uint64_t n)
{
  uint64_t c = vi_ < values_.size() ? values_[vi_++] : 0;
  return n ? c % n : c;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

Assignment initial_state(const PolyglotModel & m, Scheduler & sched)
{
  const auto & ctx = m.vars;
  unsigned bits = 0;
  for (const auto & s : ctx->slots()) {
    bits += s.type.domain_bits();
  }
  CompiledExpr init(m.init.predicate, *ctx, Position::Pre);
  auto decode = [&](uint64_t code) {
    std::vector<uint64_t> slots(ctx->slots().size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      unsigned b = ctx->slots()[i].type.domain_bits();
      slots[i] = b >= 64 ? code : code & ((uint64_t{1} << b) - 1);
      code = b >= 64 ? 0 : code >> b;
    }
    return slots;
  };
  if (bits <= 24) {
    uint64_t n = uint64_t{1} << bits;
    uint64_t off = sched.choose_init(n) % n;
    for (uint64_t i = 0; i < n; ++i) {
      auto s = decode((off + i) & (n - 1));
      if (init.test(s.data(), nullptr)) {
        return Assignment(ctx, std::move(s));
      }
    }
    throw ModelError("the initial predicate is unsatisfiable");
  }
  std::vector<uint64_t> zero(ctx->slots().size(), 0);
  if (init.test(zero.data(), nullptr) && sched.choose_init(2) == 0) {
    return Assignment(ctx, zero);
  }
  for (int tries = 0; tries < 100000; ++tries) {
    std::vector<uint64_t> s(ctx->slots().size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = sched.choose_value(0) & ctx->slots()[i].type.mask();
    }
    if (init.test(s.data(), nullptr)) {
      return Assignment(ctx, std::move(s));
    }
  }
  if (init.test(zero.data(), nullptr)) {
    return Assignment(ctx, zero);
  }
  throw ModelError("no initial state found by sampling");
}

}  // namespace

Trace simulate(const PolyglotModel & m, std::size_t steps, Scheduler & sched)
{
  for (const auto & [name, p] : m.procedures) {
    if (p.language != Language::Mini) {
      throw ModelError("simulation needs mini procedures; '" + name + "' is "
                       + to_string(p.language));
    }
  }
  std::map<std::string, CompiledExpr> guards;
  for (const auto & t : m.transitions) {
    guards.emplace(t.id, CompiledExpr(t.guard, *m.vars, Position::Pre));
  }
  std::map<std::string, MiniExecutor> execs;
  for (const auto & [name, p] : m.procedures) {
    execs.emplace(name, MiniExecutor(*p.mini));
  }

  Trace tr;
  TraceStep s0;
  s0.mode = m.init.mode;
  s0.state = initial_state(m, sched);
  tr.steps.push_back(s0);
  auto choose = [&](uint64_t n) { return sched.choose_value(n); };

  for (std::size_t k = 0; k < steps; ++k) {
    const TraceStep & cur = tr.steps.back();
    if (m.terminal.count(cur.mode)) {
      tr.maximal = true;
      break;
    }
    std::vector<const Transition *> enabled;
    for (const auto & t : m.transitions) {
      if (t.from == cur.mode && guards.at(t.id).test(cur.state)) {
        enabled.push_back(&t);
      }
    }
    if (enabled.empty()) {
      tr.stuck = true;
      tr.maximal = true;
      break;
    }
    const Transition & t = *enabled[sched.choose_transition(enabled.size()) % enabled.size()];
    TraceStep next;
    next.mode = t.to;
    next.transition = t.id;
    next.time = cur.time + t.duration;
    std::vector<uint64_t> d = cur.state.slots();
    for (const auto & pname : t.update) {
      ProcCall call;
      call.procedure = pname;
      call.pre = Assignment(m.vars, d);
      d = execs.at(pname).run(d, choose);
      call.post = Assignment(m.vars, d);
      next.calls.push_back(std::move(call));
    }
    next.state = Assignment(m.vars, d);
    tr.steps.push_back(std::move(next));
  }
  if (!tr.maximal && m.terminal.count(tr.steps.back().mode)) {
    tr.maximal = true;
  }
  return tr;
}

Assignment property_state(const PolyglotModel & m, const std::string & mode,
                          const Assignment & state)
{
  return property_state(m, m.property_context(), mode, state);
}

Assignment property_state(const PolyglotModel & m, const ContextPtr & pc,
                          const std::string & mode, const Assignment & state)
{
  std::vector<uint64_t> slots = state.slots();
  for (const auto & md : m.modes) {
    slots.push_back(md == mode ? 1 : 0);
  }
  return Assignment(pc, std::move(slots));
}

std::string to_string(Truth t)
{
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    case Truth::Inconclusive: return "inconclusive";
  }
  return "?";
}

Truth holds(const PolyglotModel & m, const Property & p, const Trace & t)
{
  ContextPtr pc = m.property_context();
  CompiledExpr pred(p.predicate, *pc, Position::Pre);
  if (p.kind == PropertyKind::Invariant) {
    for (const auto & s : t.steps) {
      if (!pred.test(property_state(m, pc, s.mode, s.state))) {
        return Truth::False;
      }
    }
    return Truth::True;
  }
  for (const auto & s : t.steps) {
    if (s.time > p.within) {
      return Truth::False;
    }
    if (pred.test(property_state(m, pc, s.mode, s.state))) {
      return Truth::True;
    }
  }
  return t.maximal ? Truth::False : Truth::Inconclusive;
}

std::vector<std::string> check_trace(const PolyglotModel & m, const Trace & t)
{
  std::vector<std::string> problems;
  if (t.steps.empty()) {
    return problems;
  }
  if (t.steps[0].mode != m.init.mode) {
    problems.push_back("first step is not in the initial mode");
  }
  if (!holds_pre(m.init.predicate, t.steps[0].state)) {
    problems.push_back("first state violates the initial predicate");
  }
  for (std::size_t i = 1; i < t.steps.size(); ++i) {
    const auto & a = t.steps[i - 1];
    const auto & b = t.steps[i];
    std::string where = "step " + std::to_string(i);
    const Transition * tr = nullptr;
    for (const auto & x : m.transitions) {
      if (x.id == b.transition) {
        tr = &x;
      }
    }
    if (!tr) {
      problems.push_back(where + ": unknown transition '" + b.transition + "'");
      continue;
    }
    if (tr->from != a.mode || tr->to != b.mode) {
      problems.push_back(where + ": transition does not link the modes");
    }
    if (!holds_pre(tr->guard, a.state)) {
      problems.push_back(where + ": guard is false");
    }
    if (b.time != a.time + tr->duration) {
      problems.push_back(where + ": time does not advance by the duration");
    }
    if (b.calls.size() != tr->update.size()) {
      problems.push_back(where + ": call count differs from the update");
      continue;
    }
    Assignment cur = a.state;
    for (std::size_t j = 0; j < b.calls.size(); ++j) {
      if (b.calls[j].procedure != tr->update[j]) {
        problems.push_back(where + ": call " + std::to_string(j) + " names the wrong procedure");
      }
      if (b.calls[j].pre != cur) {
        problems.push_back(where + ": call " + std::to_string(j) + " does not chain");
      }
      cur = b.calls[j].post;
    }
    if (cur != b.state) {
      problems.push_back(where + ": last call does not produce the step state");
    }
  }
  return problems;
}

std::string render_trace(const PolyglotModel & m, const Trace & t)
{
  (void)m;
  std::ostringstream os;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto & s = t.steps[i];
    os << "step " << i << "  t=" << s.time << "  mode=" << s.mode;
    if (!s.transition.empty()) {
      os << "  via " << s.transition;
    }
    os << "\n  state " << s.state.str() << "\n";
    for (const auto & c : s.calls) {
      os << "    " << c.procedure << ": " << c.pre.str() << " -> " << c.post.str() << "\n";
    }
  }
  if (t.stuck) {
    os << "stuck: no transition enabled\n";
  }
  return os.str();
}

}  // namespace pgv
