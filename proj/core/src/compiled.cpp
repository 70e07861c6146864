#include "pgv/compiled.hpp"

#include <algorithm>

#include "pgv/error.hpp"
#include "pgv/il.hpp"

namespace pgv {

namespace {

// Walks a Select chain down to its Var/Old root.
const Expr & select_root(const Expr & e, std::vector<std::string> & path)
{
  if (e.op() == Op::Select) {
    const Expr & r = select_root(e.kid(0), path);
    path.push_back(e.name());
    return r;
  }
  return e;
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr & e, const VarContext & ctx, Position pos)
{
  Expr flat = flatten_records(e, ctx);
  emit(flat, ctx, pos, 1);
}

void CompiledExpr::emit(const Expr & e, const VarContext & ctx, Position pos,
                        int depth)
{
  max_depth_ = std::max(max_depth_, depth);
  auto load = [&](const Expr & root, const std::vector<std::string> & path) {
    auto var = ctx.index_of(root.name());
    if (!var) {
      throw UnknownVariable(root.name());
    }
    std::vector<int> fields;
    SemType t = ctx.type(*var);
    for (const auto & f : path) {
      int i = t.field_index(f);
      fields.push_back(i);
      t = t.fields()[i].type;
    }
    std::size_t slot = ctx.slot_of(*var, fields);
    bool from_post = root.op() == Op::Var && pos == Position::Post;
    code_.push_back({from_post ? Code::LoadPost : Code::LoadPre, 0, slot});
  };

  switch (e.op()) {
    case Op::BoolLit:
      code_.push_back({Code::Const, 0, e.bool_value() ? 1u : 0u});
      return;
    case Op::IntLit:
      code_.push_back({Code::Const, 0, e.lit_bits()});
      return;
    case Op::Var:
    case Op::Old:
      load(e, {});
      return;
    case Op::Select: {
      std::vector<std::string> path;
      const Expr & root = select_root(e, path);
      load(root, path);
      return;
    }
    case Op::Not:
      emit(e.kid(0), ctx, pos, depth);
      code_.push_back({Code::Not});
      return;
    case Op::Ite:
      emit(e.kid(0), ctx, pos, depth);
      emit(e.kid(1), ctx, pos, depth + 1);
      emit(e.kid(2), ctx, pos, depth + 2);
      code_.push_back({Code::Ite});
      return;
    default:
      break;
  }

  emit(e.kid(0), ctx, pos, depth);
  emit(e.kid(1), ctx, pos, depth + 1);
  SemType t = typecheck(e.kid(0), ctx, pos);
  unsigned w = t.is_integer() ? t.width() : 1;
  bool s = e.is_signed_cmp();
  Code c;
  switch (e.op()) {
    case Op::And: c = Code::And; break;
    case Op::Or: c = Code::Or; break;
    case Op::Implies: c = Code::Implies; break;
    case Op::Eq: c = Code::Eq; break;
    case Op::Neq: c = Code::Neq; break;
    case Op::Lt: c = s ? Code::LtS : Code::LtU; break;
    case Op::Le: c = s ? Code::LeS : Code::LeU; break;
    case Op::Gt: c = s ? Code::GtS : Code::GtU; break;
    case Op::Ge: c = s ? Code::GeS : Code::GeU; break;
    case Op::Add: c = Code::Add; break;
    case Op::Sub: c = Code::Sub; break;
    default: c = Code::Mul; break;
  }
  code_.push_back({c, w, t.mask()});
}

uint64_t CompiledExpr::run(const uint64_t * pre, const uint64_t * post) const
{
  // Small fixed stack; expressions deeper than this fall back to the heap.
  uint64_t local[64];
  local[0] = 0;
  std::vector<uint64_t> heap;
  uint64_t * st = local;
  if (max_depth_ + 2 > 64) {
    heap.resize(static_cast<std::size_t>(max_depth_) + 2);
    st = heap.data();
  }
  int sp = 0;
  for (const Instr & in : code_) {
    switch (in.code) {
      case Code::LoadPre: st[sp++] = pre[in.arg]; break;
      case Code::LoadPost: st[sp++] = post[in.arg]; break;
      case Code::Const: st[sp++] = in.arg; break;
      case Code::Not: st[sp - 1] = st[sp - 1] ? 0 : 1; break;
      case Code::Ite: {
        uint64_t b = st[--sp];
        uint64_t a = st[--sp];
        st[sp - 1] = st[sp - 1] ? a : b;
        break;
      }
      default: {
        uint64_t b = st[--sp];
        uint64_t a = st[sp - 1];
        uint64_t r = 0;
        switch (in.code) {
          case Code::And: r = (a && b); break;
          case Code::Or: r = (a || b); break;
          case Code::Implies: r = (!a || b); break;
          case Code::Eq: r = a == b; break;
          case Code::Neq: r = a != b; break;
          case Code::LtU: r = a < b; break;
          case Code::LeU: r = a <= b; break;
          case Code::GtU: r = a > b; break;
          case Code::GeU: r = a >= b; break;
          case Code::LtS: r = sign_extend(a, in.width) < sign_extend(b, in.width); break;
          case Code::LeS: r = sign_extend(a, in.width) <= sign_extend(b, in.width); break;
          case Code::GtS: r = sign_extend(a, in.width) > sign_extend(b, in.width); break;
          case Code::GeS: r = sign_extend(a, in.width) >= sign_extend(b, in.width); break;
          case Code::Add: r = (a + b) & in.arg; break;
          case Code::Sub: r = (a - b) & in.arg; break;
          case Code::Mul: r = (a * b) & in.arg; break;
          default: break;
        }
        st[sp - 1] = r;
        break;
      }
    }
  }
  return st[0];
}

}  // namespace pgv
