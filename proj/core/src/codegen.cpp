#include "pgv/codegen.hpp"

#include <cctype>
#include <climits>
#include <set>
#include <sstream>

#include "pgv/error.hpp"
#include "pgv/il.hpp"

namespace pgv {

NameMap NameMap::identity(const VarContext & ctx, const std::string & pre_prefix)
{
  NameMap m;
  for (const auto & [name, type] : ctx.vars()) {
    m.post[name] = {name, AccessStyle::Direct};
    m.pre[name] = {pre_prefix + name, AccessStyle::Direct};
  }
  return m;
}

namespace {

unsigned container_width(unsigned w)
{
  if (w <= 8) {
    return 8;
  }
  if (w <= 16) {
    return 16;
  }
  if (w <= 32) {
    return 32;
  }
  return 64;
}

bool odd_width(const SemType & t)
{
  return t.is_integer() && container_width(t.width()) != t.width();
}

std::string hex(uint64_t v)
{
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

enum class Lang
{
  C,
  Rust,
  Smt
};

struct Emitter
{
  const VarContext & ctx;
  const NameMap & map;
  Lang lang;

  const NameBinding & binding(const Expr & root) const
  {
    const auto & m = root.op() == Op::Old ? map.pre : map.post;
    auto it = m.find(root.name());
    if (it == m.end()) {
      throw UnmappedVariable(root.op() == Op::Old ? "old(" + root.name() + ")"
                                                  : root.name());
    }
    return it->second;
  }

  std::string leaf(const Expr & root, const std::vector<std::string> & path) const
  {
    const NameBinding & b = binding(root);
    std::string tail;
    for (const auto & f : path) {
      tail += "." + f;
    }
    if (lang == Lang::Smt) {
      return smt_symbol(b.target + tail);
    }
    switch (b.style) {
      case AccessStyle::Direct:
        return b.target + tail;
      case AccessStyle::Pointer:
        if (path.empty()) {
          return "(*" + b.target + ")";
        }
        return lang == Lang::C ? b.target + "->" + tail.substr(1)
                               : b.target + tail;
      case AccessStyle::Port:
        if (path.empty()) {
          return lang == Lang::C ? b.target + "->value" : b.target + ".value";
        }
        return lang == Lang::C ? b.target + "->" + tail.substr(1)
                               : b.target + tail;
    }
    return b.target;
  }

  std::string literal(const SemType & t, uint64_t bits) const
  {
    switch (lang) {
      case Lang::Smt:
        return smt_value(t, bits);
      case Lang::C: {
        if (!t.is_signed()) {
          return std::to_string(bits) + (container_width(t.width()) == 64 ? "ULL" : "U");
        }
        int64_t v = sign_extend(bits, t.width());
        std::string ty = c_type(t);
        if (v == INT64_MIN) {
          return "((" + ty + ")(-9223372036854775807LL - 1))";
        }
        return "((" + ty + ")" + std::to_string(v)
               + (container_width(t.width()) == 64 ? "LL" : "") + ")";
      }
      case Lang::Rust: {
        std::string ty = rust_type(t);
        if (!t.is_signed()) {
          return std::to_string(bits) + ty;
        }
        int64_t v = sign_extend(bits, t.width());
        unsigned cw = container_width(t.width());
        if (cw == t.width() && v == sign_extend(uint64_t{1} << (cw - 1), cw)) {
          return ty + "::MIN";
        }
        if (v < 0) {
          return "(" + std::to_string(v) + ty + ")";
        }
        return std::to_string(v) + ty;
      }
    }
    return "";
  }

  std::string arith(Op op, const SemType & t, const std::string & a,
                    const std::string & b) const
  {
    unsigned w = t.width();
    unsigned cw = container_width(w);
    if (lang == Lang::C) {
      const char * sym = op == Op::Add ? " + " : op == Op::Sub ? " - " : " * ";
      std::string raw = "(uint64_t)" + a + sym + "(uint64_t)" + b;
      std::string ty = c_type(t);
      if (cw == w) {
        return "((" + ty + ")(" + raw + "))";
      }
      if (!t.is_signed()) {
        return "((" + ty + ")((" + raw + ") & " + hex(t.mask()) + "ULL))";
      }
      std::string sh = std::to_string(64 - w);
      return "((" + ty + ")((int64_t)((" + raw + ") << " + sh + ") >> " + sh + "))";
    }
    // Rust
    const char * fn = op == Op::Add ? ".wrapping_add(" : op == Op::Sub ? ".wrapping_sub(" : ".wrapping_mul(";
    std::string raw = a + fn + b + ")";
    if (cw == w) {
      return raw;
    }
    if (!t.is_signed()) {
      return "(" + raw + " & " + hex(t.mask()) + rust_type(t) + ")";
    }
    std::string sh = std::to_string(cw - w);
    return "((" + raw + " << " + sh + ") >> " + sh + ")";
  }

  static const Expr & select_root(const Expr & e, std::vector<std::string> & path)
  {
    if (e.op() == Op::Select) {
      const Expr & r = select_root(e.kid(0), path);
      path.push_back(e.name());
      return r;
    }
    return e;
  }

  std::pair<std::string, SemType> emit(const Expr & e) const
  {
    switch (e.op()) {
      case Op::BoolLit:
        if (lang == Lang::C) {
          return {e.bool_value() ? "1" : "0", SemType::boolean()};
        }
        return {e.bool_value() ? "true" : "false", SemType::boolean()};
      case Op::IntLit:
        return {literal(e.lit_type(), e.lit_bits()), e.lit_type()};
      case Op::Var:
      case Op::Old:
      case Op::Select: {
        std::vector<std::string> path;
        const Expr & root = select_root(e, path);
        return {leaf(root, path), typecheck(e, ctx, Position::Post)};
      }
      case Op::Not: {
        auto a = emit(e.kid(0)).first;
        if (lang == Lang::Smt) {
          return {"(not " + a + ")", SemType::boolean()};
        }
        return {"(!" + a + ")", SemType::boolean()};
      }
      case Op::Ite: {
        auto c = emit(e.kid(0)).first;
        auto [a, t] = emit(e.kid(1));
        auto b = emit(e.kid(2)).first;
        switch (lang) {
          case Lang::Smt: return {"(ite " + c + " " + a + " " + b + ")", t};
          case Lang::Rust:
            return {"(if " + c + " { " + a + " } else { " + b + " })", t};
          case Lang::C:
            if (t.is_bool()) {
              return {"(" + c + " ? " + a + " : " + b + ")", t};
            }
            return {"((" + c_type(t) + ")(" + c + " ? " + a + " : " + b + "))", t};
        }
        break;
      }
      default:
        break;
    }
    auto [a, ta] = emit(e.kid(0));
    auto b = emit(e.kid(1)).first;
    bool s = e.is_signed_cmp();
    if (lang == Lang::Smt) {
      const char * f = "";
      switch (e.op()) {
        case Op::And: f = "and"; break;
        case Op::Or: f = "or"; break;
        case Op::Implies: f = "=>"; break;
        case Op::Eq: f = "="; break;
        case Op::Neq: f = "distinct"; break;
        case Op::Lt: f = s ? "bvslt" : "bvult"; break;
        case Op::Le: f = s ? "bvsle" : "bvule"; break;
        case Op::Gt: f = s ? "bvsgt" : "bvugt"; break;
        case Op::Ge: f = s ? "bvsge" : "bvuge"; break;
        case Op::Add: f = "bvadd"; break;
        case Op::Sub: f = "bvsub"; break;
        case Op::Mul: f = "bvmul"; break;
        default: break;
      }
      SemType rt = is_arith(e.op()) ? ta : SemType::boolean();
      return {std::string("(") + f + " " + a + " " + b + ")", rt};
    }
    if (is_arith(e.op())) {
      return {arith(e.op(), ta, a, b), ta};
    }
    const char * sym = "";
    switch (e.op()) {
      case Op::And: sym = " && "; break;
      case Op::Or: sym = " || "; break;
      case Op::Implies: return {"(!" + a + " || " + b + ")", SemType::boolean()};
      case Op::Eq: sym = " == "; break;
      case Op::Neq: sym = " != "; break;
      case Op::Lt: sym = " < "; break;
      case Op::Le: sym = " <= "; break;
      case Op::Gt: sym = " > "; break;
      case Op::Ge: sym = " >= "; break;
      default: break;
    }
    return {"(" + a + sym + b + ")", SemType::boolean()};
  }
};

std::string compile(const Expr & e, const VarContext & ctx, const NameMap & m,
                    Lang lang)
{
  Expr flat = flatten_records(e, ctx);
  Emitter em{ctx, m, lang};
  return em.emit(flat).first;
}

}  // namespace

std::string compile_to_c(const Expr & e, const VarContext & ctx, const NameMap & m)
{
  return compile(e, ctx, m, Lang::C);
}

std::string compile_to_rust(const Expr & e, const VarContext & ctx,
                            const NameMap & m)
{
  return compile(e, ctx, m, Lang::Rust);
}

std::string compile_to_smt(const Expr & e, const VarContext & ctx,
                           const NameMap & m)
{
  return compile(e, ctx, m, Lang::Smt);
}

std::string smt_sort(const SemType & t)
{
  if (t.is_bool()) {
    return "Bool";
  }
  if (!t.is_integer()) {
    throw CodegenError("no SMT sort for record type " + t.str());
  }
  return "(_ BitVec " + std::to_string(t.width()) + ")";
}

std::string smt_value(const SemType & t, uint64_t bits)
{
  if (t.is_bool()) {
    return bits ? "true" : "false";
  }
  return "(_ bv" + std::to_string(bits & t.mask()) + " "
         + std::to_string(t.width()) + ")";
}

std::string smt_symbol(const std::string & name)
{
  static const std::string kExtra = "~!@$%^&*_-+=<>.?/";
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && kExtra.find(c) == std::string::npos) {
      simple = false;
    }
  }
  return simple ? name : "|" + name + "|";
}

std::string smt_slot_symbol(const VarContext & ctx, std::size_t slot,
                            const std::string & target)
{
  const Slot & s = ctx.slots()[slot];
  return smt_symbol(target + s.path.substr(ctx.name(s.var).size()));
}

std::string c_type(const SemType & t)
{
  if (t.is_bool()) {
    return "_Bool";
  }
  if (!t.is_integer()) {
    throw CodegenError("no C scalar type for " + t.str());
  }
  return std::string(t.is_signed() ? "int" : "uint")
         + std::to_string(container_width(t.width())) + "_t";
}

std::string rust_type(const SemType & t)
{
  if (t.is_bool()) {
    return "bool";
  }
  if (!t.is_integer()) {
    throw CodegenError("no Rust scalar type for " + t.str());
  }
  return std::string(t.is_signed() ? "i" : "u")
         + std::to_string(container_width(t.width()));
}

// ---------------------------------------------------------------------------
// Harnesses

namespace {

struct Leaf
{
  std::vector<std::string> path;
  SemType type;
};

void scalar_leaves(const SemType & t, std::vector<std::string> & cur,
                   std::vector<Leaf> & out)
{
  if (!t.is_record()) {
    out.push_back({cur, t});
    return;
  }
  for (const auto & f : t.fields()) {
    cur.push_back(f.name);
    scalar_leaves(f.type, cur, out);
    cur.pop_back();
  }
}

std::vector<Leaf> leaves_of(const SemType & t)
{
  std::vector<Leaf> out;
  std::vector<std::string> cur;
  scalar_leaves(t, cur, out);
  return out;
}

NameBinding effective(const HarnessVar & v)
{
  NameBinding b = v.binding;
  if (b.target.empty()) {
    b.target = v.name;
  }
  return b;
}

std::string join(const std::vector<std::string> & lines)
{
  std::string out;
  for (const auto & l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

void check_spec(const HarnessSpec & h, const VarContext & ctx)
{
  if (h.entry.empty() && h.call.empty()) {
    throw CodegenError("harness entry point is empty");
  }
  for (const auto & e : {h.contract.pre, h.contract.post}) {
    for (const auto & n : referenced_vars(e)) {
      if (!ctx.contains(n)) {
        throw ContractVariableUnmapped(n);
      }
    }
  }
  check_contract(h.contract, ctx);
}

bool is_nondet(const HarnessSpec & h, const std::string & name)
{
  if (h.nondet.empty()) {
    return true;
  }
  for (const auto & n : h.nondet) {
    if (n == name) {
      return true;
    }
  }
  return false;
}

std::string range_check(const std::string & lv, const SemType & t, Lang lang)
{
  if (!odd_width(t)) {
    return "";
  }
  uint64_t lo_bits = uint64_t{1} << (t.width() - 1);
  if (!t.is_signed()) {
    if (lang == Lang::C) {
      return lv + " <= " + std::to_string(t.mask()) + "U";
    }
    return lv + " <= " + std::to_string(t.mask()) + rust_type(t);
  }
  int64_t lo = sign_extend(lo_bits, t.width());
  int64_t hi = -(lo + 1);
  if (lang == Lang::C) {
    return lv + " >= " + std::to_string(lo) + " && " + lv + " <= " + std::to_string(hi);
  }
  std::string ty = rust_type(t);
  return lv + " >= " + std::to_string(lo) + ty + " && " + lv + " <= "
         + std::to_string(hi) + ty;
}

}  // namespace

VarContext harness_context(const HarnessSpec & h)
{
  std::vector<std::pair<std::string, SemType>> vars;
  for (const auto & v : h.vars) {
    vars.emplace_back(v.name, v.type);
  }
  return VarContext(std::move(vars));
}

std::string emit_cbmc_harness(const HarnessSpec & h)
{
  VarContext ctx = harness_context(h);
  check_spec(h, ctx);

  NameMap map;
  for (const auto & v : h.vars) {
    map.post[v.name] = effective(v);
    map.pre[v.name] = {"old_" + v.name, AccessStyle::Direct};
  }
  // `current` binding without old/new renaming, for snapshots and probes.
  auto whole = [&](const HarnessVar & v) {
    NameBinding b = effective(v);
    switch (b.style) {
      case AccessStyle::Direct: return b.target;
      case AccessStyle::Pointer: return "(*" + b.target + ")";
      case AccessStyle::Port:
        return v.type.is_record() ? "(*" + b.target + ")" : b.target + "->value";
    }
    return b.target;
  };
  auto value_type = [&](const HarnessVar & v) {
    if (v.type.is_record()) {
      if (v.target_type.empty()) {
        throw CodegenError("record variable '" + v.name + "' needs a target type");
      }
      return v.target_type;
    }
    return c_type(v.type);
  };

  std::vector<std::string> out;
  out.push_back("#include <assert.h>");
  out.push_back("#include <stdbool.h>");
  out.push_back("#include <stdint.h>");
  out.push_back("#include <stdlib.h>");
  out.push_back("");
  if (!h.preamble.empty()) {
    out.push_back(h.preamble);
  }

  std::vector<std::string> decls;
  for (const auto & v : h.vars) {
    if (!v.declare) {
      continue;
    }
    NameBinding b = effective(v);
    switch (b.style) {
      case AccessStyle::Direct:
        decls.push_back(value_type(v) + " " + b.target + ";");
        break;
      case AccessStyle::Pointer:
        decls.push_back(value_type(v) + " *" + b.target + ";");
        break;
      case AccessStyle::Port:
        if (v.target_type.empty()) {
          throw CodegenError("port variable '" + v.name + "' needs a target type");
        }
        decls.push_back(v.target_type + " *" + b.target + ";");
        break;
    }
  }
  if (!decls.empty()) {
    out.push_back(join(decls));
  }
  if (!h.procedure_source.empty()) {
    std::string src = h.procedure_source;
    while (!src.empty() && src.back() == '\n') {
      src.pop_back();
    }
    out.push_back(src);
    out.push_back("");
  }

  // nondet initialization
  std::set<std::string> protos;
  std::vector<std::string> body;
  std::vector<std::string> nonnull;
  for (const auto & v : h.vars) {
    NameBinding b = effective(v);
    if (b.style != AccessStyle::Direct) {
      body.push_back("  " + b.target + " = calloc(1, sizeof(*" + b.target + "));");
      nonnull.push_back(b.target + " != NULL");
    }
  }
  if (!nonnull.empty()) {
    std::string cond;
    for (std::size_t i = 0; i < nonnull.size(); ++i) {
      cond += (i ? " && " : "") + nonnull[i];
    }
    body.push_back("  __CPROVER_assume(" + cond + ");");
  }
  for (const auto & v : h.vars) {
    if (!is_nondet(h, v.name)) {
      continue;
    }
    for (const auto & l : leaves_of(v.type)) {
      Emitter em{ctx, map, Lang::C};
      std::string lv = em.leaf(Expr::var(v.name), l.path);
      std::string fn = l.type.is_bool() ? "nondet_bool" : "nondet_" + c_type(l.type);
      protos.insert(c_type(l.type) + " " + fn + "(void);");
      body.push_back("  " + lv + " = " + fn + "();");
      std::string rc = range_check(lv, l.type, Lang::C);
      if (!rc.empty()) {
        body.push_back("  __CPROVER_assume(" + rc + ");");
      }
    }
  }
  for (const auto & v : h.vars) {
    body.push_back("  " + value_type(v) + " old_" + v.name + " = " + whole(v) + ";");
  }
  body.push_back("  __CPROVER_assume(" + compile_to_c(h.contract.pre, ctx, map) + ");");
  body.push_back("  " + (h.call.empty() ? h.entry + "();" : h.call));
  for (const auto & v : h.vars) {
    body.push_back("  " + value_type(v) + " new_" + v.name + " = " + whole(v) + ";");
  }
  body.push_back("  assert(" + compile_to_c(h.contract.post, ctx, map) + ");");
  body.push_back("  return 0;");

  if (!protos.empty()) {
    out.push_back(join(std::vector<std::string>(protos.begin(), protos.end())));
  }
  out.push_back("int main(void)");
  out.push_back("{");
  for (auto & l : body) {
    out.push_back(l);
  }
  out.push_back("}");
  return join(out);
}

std::string emit_kani_harness(const HarnessSpec & h)
{
  VarContext ctx = harness_context(h);
  check_spec(h, ctx);

  NameMap map;
  for (const auto & v : h.vars) {
    NameBinding b = effective(v);
    if (b.style == AccessStyle::Pointer) {
      b.style = AccessStyle::Direct;  // locals in the harness
    }
    map.post[v.name] = b;
    map.pre[v.name] = {"old_" + v.name, AccessStyle::Direct};
  }
  auto rtype = [&](const HarnessVar & v) {
    if (v.type.is_record() || effective(v).style == AccessStyle::Port) {
      if (v.target_type.empty()) {
        throw CodegenError("variable '" + v.name + "' needs a target type");
      }
      return v.target_type;
    }
    return rust_type(v.type);
  };
  auto whole = [&](const HarnessVar & v) {
    NameBinding b = effective(v);
    if (b.style == AccessStyle::Port && !v.type.is_record()) {
      return b.target + ".value";
    }
    return b.target;
  };

  std::vector<std::string> out;
  if (!h.preamble.empty()) {
    out.push_back(h.preamble);
  }
  if (!h.procedure_source.empty()) {
    std::string src = h.procedure_source;
    while (!src.empty() && src.back() == '\n') {
      src.pop_back();
    }
    out.push_back(src);
    out.push_back("");
  }
  out.push_back("#[cfg(kani)]");
  out.push_back("#[kani::proof]");
  out.push_back("#[allow(unused_mut, unused_variables, unused_parens)]");
  out.push_back("fn check_" + (h.entry.empty() ? std::string("procedure") : h.entry) + "() {");
  for (const auto & v : h.vars) {
    NameBinding b = effective(v);
    std::string init = is_nondet(h, v.name) ? "kani::any()" : "Default::default()";
    out.push_back("    let mut " + b.target + ": " + rtype(v) + " = " + init + ";");
    if (is_nondet(h, v.name)) {
      Emitter em{ctx, map, Lang::Rust};
      for (const auto & l : leaves_of(v.type)) {
        std::string rc = range_check(em.leaf(Expr::var(v.name), l.path), l.type, Lang::Rust);
        if (!rc.empty()) {
          out.push_back("    kani::assume(" + rc + ");");
        }
      }
    }
  }
  for (const auto & v : h.vars) {
    std::string w = whole(v);
    out.push_back("    let old_" + v.name + " = " + w
                  + (v.type.is_record() ? ".clone()" : "") + ";");
  }
  out.push_back("    kani::assume(" + compile_to_rust(h.contract.pre, ctx, map) + ");");
  if (!h.call.empty()) {
    out.push_back("    " + h.call);
  } else {
    std::string args;
    for (const auto & v : h.vars) {
      NameBinding b = effective(v);
      if (!args.empty()) {
        args += ", ";
      }
      args += (v.role == VarRole::Input ? "" : "&mut ") + b.target;
    }
    out.push_back("    " + h.entry + "(" + args + ");");
  }
  for (const auto & v : h.vars) {
    out.push_back("    let new_" + v.name + " = " + whole(v)
                  + (v.type.is_record() ? ".clone()" : "") + ";");
  }
  out.push_back("    assert!(" + compile_to_rust(h.contract.post, ctx, map) + ");");
  out.push_back("}");
  return join(out);
}

}  // namespace pgv
