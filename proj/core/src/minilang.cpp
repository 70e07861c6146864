#include "pgv/minilang.hpp"

#include <algorithm>

#include "il_internal.hpp"
#include "pgv/error.hpp"
#include "pgv/il.hpp"

namespace pgv {

using detail::Tok;
using detail::TokenStream;

bool operator==(const MiniStmt & a, const MiniStmt & b)
{
  if (a.kind != b.kind || a.var != b.var || a.path != b.path) {
    return false;
  }
  switch (a.kind) {
    case MiniStmt::Kind::Assign: return a.rhs == b.rhs;
    case MiniStmt::Kind::Havoc: return a.range == b.range;
    case MiniStmt::Kind::If:
      return a.cond == b.cond && a.then_body == b.then_body
             && a.else_body == b.else_body;
    case MiniStmt::Kind::Skip: return true;
  }
  return false;
}

namespace {

struct Target
{
  std::size_t var;
  SemType type;
  std::size_t slot_begin;
};

Target resolve_target(const VarContext & ctx, const std::string & var,
                      const std::vector<std::string> & path)
{
  auto idx = ctx.index_of(var);
  if (!idx) {
    throw UnknownVariable(var);
  }
  SemType t = ctx.type(*idx);
  std::size_t off = ctx.slot_offset(*idx);
  for (const auto & f : path) {
    int fi = t.field_index(f);
    if (!t.is_record() || fi < 0) {
      throw TypeError(var, "record with field " + f, t.str());
    }
    for (int j = 0; j < fi; ++j) {
      off += t.fields()[j].type.slot_count();
    }
    t = t.fields()[fi].type;
  }
  return {*idx, t, off};
}

uint64_t parse_range_value(TokenStream & ts, const SemType & t)
{
  std::size_t at = ts.offset();
  bool neg = ts.accept_punct("-");
  const auto & tok = ts.peek();
  if (tok.kind != Tok::Int) {
    throw SyntaxError("expected an integer bound", at);
  }
  uint64_t v = ts.next().value;
  if (!t.is_integer()) {
    throw TypeError("havoc range", "integer target", t.str());
  }
  if (t.is_signed()) {
    int64_t sv = neg ? -static_cast<int64_t>(v) : static_cast<int64_t>(v);
    int64_t lo = sign_extend(uint64_t{1} << (t.width() - 1), t.width());
    int64_t hi = -(lo + 1);
    if (sv < lo || sv > hi) {
      throw TypeError("havoc range", t.str(), "bound out of range");
    }
    return static_cast<uint64_t>(sv) & t.mask();
  }
  if (neg || v > t.mask()) {
    throw TypeError("havoc range", t.str(), "bound out of range");
  }
  return v;
}

struct MiniParser
{
  TokenStream & ts;
  const VarContext & ctx;

  std::vector<MiniStmt> block_until(std::string_view close)
  {
    std::vector<MiniStmt> out;
    while (true) {
      while (ts.accept_punct(";")) {
      }
      if (close.empty() ? ts.at_end() : ts.is_punct(close)) {
        return out;
      }
      if (ts.at_end()) {
        throw SyntaxError("expected '" + std::string(close) + "'", ts.offset());
      }
      out.push_back(statement());
    }
  }

  std::vector<MiniStmt> braced()
  {
    ts.expect_punct("{");
    auto b = block_until("}");
    ts.expect_punct("}");
    return b;
  }

  MiniStmt statement()
  {
    MiniStmt s;
    if (ts.accept_ident("skip")) {
      s.kind = MiniStmt::Kind::Skip;
      return s;
    }
    if (ts.accept_ident("if")) {
      s.kind = MiniStmt::Kind::If;
      auto syn = detail::parse_syn(ts);
      s.cond = detail::elaborate(syn, ctx, Position::Pre, SemType::boolean(),
                                 ts.text());
      s.then_body = braced();
      if (ts.accept_ident("else")) {
        if (ts.is_ident("if")) {
          s.else_body.push_back(statement());
        } else {
          s.else_body = braced();
        }
      }
      return s;
    }
    if (ts.accept_ident("havoc")) {
      s.kind = MiniStmt::Kind::Havoc;
      lvalue(s);
      Target t = resolve_target(ctx, s.var, s.path);
      if (ts.accept_ident("in")) {
        uint64_t lo = parse_range_value(ts, t.type);
        ts.expect_punct("..");
        uint64_t hi = parse_range_value(ts, t.type);
        bool ok = t.type.is_signed()
                      ? sign_extend(lo, t.type.width()) <= sign_extend(hi, t.type.width())
                      : lo <= hi;
        if (!ok) {
          throw TypeError("havoc range", "lo <= hi", "empty range");
        }
        s.range = std::make_pair(lo, hi);
      }
      return s;
    }
    s.kind = MiniStmt::Kind::Assign;
    lvalue(s);
    Target t = resolve_target(ctx, s.var, s.path);
    ts.expect_punct(":=");
    auto syn = detail::parse_syn(ts);
    s.rhs = detail::elaborate(syn, ctx, Position::Pre, t.type, ts.text());
    return s;
  }

  void lvalue(MiniStmt & s)
  {
    s.var = ts.expect_name();
    while (ts.is_punct(".") && ts.peek(1).kind == Tok::Ident) {
      ts.next();
      s.path.push_back(ts.next().text);
    }
  }
};

void print_block(const VarContext & ctx, const std::vector<MiniStmt> & body,
                 int indent, std::string & out)
{
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto & s : body) {
    std::string lv = s.var;
    for (const auto & f : s.path) {
      lv += "." + f;
    }
    switch (s.kind) {
      case MiniStmt::Kind::Skip:
        out += pad + "skip\n";
        break;
      case MiniStmt::Kind::Assign:
        out += pad + lv + " := " + pretty_print_in_context(s.rhs) + "\n";
        break;
      case MiniStmt::Kind::Havoc:
        out += pad + "havoc " + lv;
        if (s.range) {
          SemType t = resolve_target(ctx, s.var, s.path).type;
          auto bound = [&](uint64_t b) {
            return t.is_signed() ? std::to_string(sign_extend(b, t.width()))
                                 : std::to_string(b);
          };
          out += " in " + bound(s.range->first) + ".." + bound(s.range->second);
        }
        out += "\n";
        break;
      case MiniStmt::Kind::If:
        out += pad + "if (" + pretty_print(s.cond) + ") {\n";
        print_block(ctx, s.then_body, indent + 1, out);
        out += pad + "}";
        if (!s.else_body.empty()) {
          out += " else {\n";
          print_block(ctx, s.else_body, indent + 1, out);
          out += pad + "}";
        }
        out += "\n";
        break;
    }
  }
}

void collect(const std::vector<MiniStmt> & body, std::set<std::string> & reads,
             std::set<std::string> & writes)
{
  for (const auto & s : body) {
    switch (s.kind) {
      case MiniStmt::Kind::Assign: {
        writes.insert(s.var);
        auto r = referenced_vars(s.rhs);
        reads.insert(r.begin(), r.end());
        break;
      }
      case MiniStmt::Kind::Havoc:
        writes.insert(s.var);
        break;
      case MiniStmt::Kind::If: {
        auto r = referenced_vars(s.cond);
        reads.insert(r.begin(), r.end());
        collect(s.then_body, reads, writes);
        collect(s.else_body, reads, writes);
        break;
      }
      case MiniStmt::Kind::Skip:
        break;
    }
  }
}

void flatten_value(const Value & v, std::vector<uint64_t> & out)
{
  if (!v.type().is_record()) {
    out.push_back(v.bits());
    return;
  }
  for (const auto & f : v.fields()) {
    flatten_value(f, out);
  }
}

void leaf_types(const SemType & t, std::vector<SemType> & out)
{
  if (!t.is_record()) {
    out.push_back(t);
    return;
  }
  for (const auto & f : t.fields()) {
    leaf_types(f.type, out);
  }
}

}  // namespace

MiniProc parse_mini(std::string_view text, ContextPtr ctx, std::string name)
{
  TokenStream ts(text);
  MiniParser p{ts, *ctx};
  MiniProc proc;
  proc.name = std::move(name);
  proc.ctx = std::move(ctx);
  proc.body = p.block_until("");
  return proc;
}

std::string print_mini(const MiniProc & p)
{
  std::string out;
  print_block(*p.ctx, p.body, 0, out);
  return out;
}

std::set<std::string> mini_writes(const MiniProc & p)
{
  std::set<std::string> r, w;
  collect(p.body, r, w);
  return w;
}

std::set<std::string> mini_vars(const MiniProc & p)
{
  std::set<std::string> r, w;
  collect(p.body, r, w);
  r.insert(w.begin(), w.end());
  return r;
}

// ---------------------------------------------------------------------------
// Execution

MiniExecutor::MiniExecutor(const MiniProc & p) : proc_(&p)
{
  body_ = lower(p.body);
}

std::vector<MiniExecutor::Step> MiniExecutor::lower(
    const std::vector<MiniStmt> & body) const
{
  const VarContext & ctx = *proc_->ctx;
  std::vector<Step> out;
  for (const auto & s : body) {
    Step st;
    st.kind = s.kind;
    switch (s.kind) {
      case MiniStmt::Kind::Skip:
        break;
      case MiniStmt::Kind::If:
        st.rhs = CompiledExpr(s.cond, ctx, Position::Pre);
        st.then_body = lower(s.then_body);
        st.else_body = lower(s.else_body);
        break;
      case MiniStmt::Kind::Assign: {
        Target t = resolve_target(ctx, s.var, s.path);
        st.slot_begin = t.slot_begin;
        st.slot_count = t.type.slot_count();
        st.scalar_rhs = t.type.is_scalar();
        if (st.scalar_rhs) {
          st.rhs = CompiledExpr(s.rhs, ctx, Position::Pre);
        } else {
          st.rhs_expr = s.rhs;
        }
        break;
      }
      case MiniStmt::Kind::Havoc: {
        Target t = resolve_target(ctx, s.var, s.path);
        st.slot_begin = t.slot_begin;
        st.slot_count = t.type.slot_count();
        leaf_types(t.type, st.leaf_types);
        if (t.type.is_scalar()) {
          uint64_t lo = 0, hi = t.type.is_bool() ? 1 : t.type.mask();
          if (s.range) {
            lo = s.range->first;
            hi = s.range->second;
          }
          st.lo = lo;
          st.count = ((hi - lo) & t.type.mask()) + 1;  // 0 when the full 64-bit domain
        }
        break;
      }
    }
    out.push_back(std::move(st));
  }
  return out;
}

void MiniExecutor::exec(const std::vector<Step> & body, std::size_t i,
                        std::vector<uint64_t> & s,
                        const std::function<void(std::vector<uint64_t> &)> & k) const
{
  if (i == body.size()) {
    k(s);
    return;
  }
  const Step & st = body[i];
  switch (st.kind) {
    case MiniStmt::Kind::Skip:
      exec(body, i + 1, s, k);
      return;
    case MiniStmt::Kind::If: {
      bool c = st.rhs.test(s.data(), nullptr);
      exec(c ? st.then_body : st.else_body, 0, s,
           [&](std::vector<uint64_t> & s2) { exec(body, i + 1, s2, k); });
      return;
    }
    case MiniStmt::Kind::Assign: {
      std::vector<uint64_t> saved(s.begin() + st.slot_begin,
                                  s.begin() + st.slot_begin + st.slot_count);
      if (st.scalar_rhs) {
        s[st.slot_begin] = st.rhs.run(s.data(), nullptr);
      } else {
        Assignment a(proc_->ctx, s);
        std::vector<uint64_t> flat;
        flatten_value(eval(st.rhs_expr, a, nullptr), flat);
        std::copy(flat.begin(), flat.end(), s.begin() + st.slot_begin);
      }
      exec(body, i + 1, s, k);
      std::copy(saved.begin(), saved.end(), s.begin() + st.slot_begin);
      return;
    }
    case MiniStmt::Kind::Havoc: {
      std::vector<uint64_t> saved(s.begin() + st.slot_begin,
                                  s.begin() + st.slot_begin + st.slot_count);
      if (st.slot_count == 1) {
        const SemType & t = st.leaf_types[0];
        if (st.count == 0) {
          throw RangeTooLarge("havoc over a 64-bit domain cannot be enumerated");
        }
        for (uint64_t j = 0; j < st.count; ++j) {
          s[st.slot_begin] = (st.lo + j) & (t.is_bool() ? 1 : t.mask());
          exec(body, i + 1, s, k);
        }
      } else {
        // odometer over every leaf's full domain
        unsigned bits = 0;
        for (const auto & t : st.leaf_types) {
          bits += t.domain_bits();
        }
        if (bits > 32) {
          throw RangeTooLarge("havoc over a record domain of " + std::to_string(bits) + " bits");
        }
        for (uint64_t code = 0; code < (uint64_t{1} << bits); ++code) {
          uint64_t rest = code;
          for (std::size_t j = 0; j < st.leaf_types.size(); ++j) {
            unsigned b = st.leaf_types[j].domain_bits();
            s[st.slot_begin + j] = rest & ((uint64_t{1} << b) - 1);
            rest >>= b;
          }
          exec(body, i + 1, s, k);
        }
      }
      std::copy(saved.begin(), saved.end(), s.begin() + st.slot_begin);
      return;
    }
  }
}

void MiniExecutor::each(const std::vector<uint64_t> & d,
                        const std::function<void(const std::vector<uint64_t> &)> & out,
                        std::size_t path_cap) const
{
  std::vector<uint64_t> s = d;
  std::size_t paths = 0;
  exec(body_, 0, s, [&](std::vector<uint64_t> & fin) {
    if (++paths > path_cap) {
      throw RangeTooLarge("procedure '" + proc_->name + "' has more than "
                          + std::to_string(path_cap) + " execution paths");
    }
    out(fin);
  });
}

std::vector<uint64_t> MiniExecutor::run(
    std::vector<uint64_t> d, const std::function<uint64_t(uint64_t)> & choose) const
{
  // Walk one path, resolving each havoc by `choose`.
  std::function<void(const std::vector<Step> &)> walk =
      [&](const std::vector<Step> & body) {
        for (const Step & st : body) {
          switch (st.kind) {
            case MiniStmt::Kind::Skip: break;
            case MiniStmt::Kind::If:
              walk(st.rhs.test(d.data(), nullptr) ? st.then_body : st.else_body);
              break;
            case MiniStmt::Kind::Assign:
              if (st.scalar_rhs) {
                d[st.slot_begin] = st.rhs.run(d.data(), nullptr);
              } else {
                Assignment a(proc_->ctx, d);
                std::vector<uint64_t> flat;
                flatten_value(eval(st.rhs_expr, a, nullptr), flat);
                std::copy(flat.begin(), flat.end(), d.begin() + st.slot_begin);
              }
              break;
            case MiniStmt::Kind::Havoc:
              for (std::size_t j = 0; j < st.leaf_types.size(); ++j) {
                const SemType & t = st.leaf_types[j];
                uint64_t m = t.is_bool() ? 1 : t.mask();
                if (st.slot_count == 1 && st.count != 0) {
                  d[st.slot_begin] = (st.lo + choose(st.count) % st.count) & m;
                } else {
                  uint64_t n = m + 1;  // wraps to 0 for 64-bit
                  uint64_t v = choose(n);
                  d[st.slot_begin + j] = (n ? v % n : v) & m;
                }
              }
              break;
          }
        }
      };
  walk(body_);
  return d;
}

std::vector<Assignment> exec_mini(const MiniProc & p, const Assignment & d,
                                  std::size_t cap)
{
  MiniExecutor ex(p);
  std::vector<std::vector<uint64_t>> states;
  ex.each(
      d.slots(),
      [&](const std::vector<uint64_t> & s) {
        states.push_back(s);
        if (states.size() > cap) {
          std::sort(states.begin(), states.end());
          states.erase(std::unique(states.begin(), states.end()), states.end());
          if (states.size() > cap) {
            throw RangeTooLarge("procedure '" + p.name + "' reaches more than "
                                + std::to_string(cap) + " post-states");
          }
        }
      },
      cap * 16);
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  std::vector<Assignment> out;
  out.reserve(states.size());
  for (auto & s : states) {
    out.emplace_back(p.ctx, std::move(s));
  }
  return out;
}

Assignment run_mini(const MiniProc & p, const Assignment & d,
                    const std::function<uint64_t(uint64_t)> & choose)
{
  MiniExecutor ex(p);
  return Assignment(p.ctx, ex.run(d.slots(), choose));
}

bool mini_can_produce(const MiniProc & p, const Assignment & pre,
                      const Assignment & post)
{
  MiniExecutor ex(p);
  bool found = false;
  ex.each(
      pre.slots(),
      [&](const std::vector<uint64_t> & s) {
        if (s == post.slots()) {
          found = true;
        }
      },
      std::size_t{1} << 20);
  return found;
}

BruteResult brute_verify(const Contract & c, const MiniProc & p, unsigned max_bits)
{
  const VarContext & ctx = *p.ctx;
  std::set<std::string> names = mini_vars(p);
  for (const auto & e : {c.pre, c.post}) {
    auto r = referenced_vars(e);
    names.insert(r.begin(), r.end());
  }
  std::vector<std::size_t> slots;
  std::vector<unsigned> widths;
  unsigned bits = 0;
  for (std::size_t i = 0; i < ctx.slots().size(); ++i) {
    const Slot & s = ctx.slots()[i];
    if (names.count(ctx.name(s.var))) {
      slots.push_back(i);
      widths.push_back(s.type.domain_bits());
      bits += s.type.domain_bits();
    }
  }
  if (bits > max_bits) {
    throw DomainTooLarge("procedure '" + p.name + "' needs " + std::to_string(bits)
                         + " bits of pre-state, cap is " + std::to_string(max_bits));
  }
  CompiledExpr pre(c.pre, ctx, Position::Pre);
  CompiledExpr post(c.post, ctx, Position::Post);
  MiniExecutor ex(p);

  BruteResult res;
  const uint64_t n = uint64_t{1} << bits;
  const uint64_t mask = n - 1;
  // odd multiplier: a bijection on [0, n) that spreads consecutive codes
  const uint64_t mult = 0x9E3779B97F4A7C15ull | 1u;
  std::vector<uint64_t> d(ctx.slots().size(), 0);
  struct Found
  {
  };
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t code = (i * mult) & mask;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      d[slots[j]] = code & ((uint64_t{1} << widths[j]) - 1);
      code >>= widths[j];
    }
    ++res.states_checked;
    if (!pre.test(d.data(), nullptr)) {
      continue;
    }
    try {
      ex.each(
          d,
          [&](const std::vector<uint64_t> & s) {
            if (!post.test(d.data(), s.data())) {
              res.pass = false;
              res.pre = Assignment(p.ctx, d);
              res.post = Assignment(p.ctx, s);
              throw Found{};
            }
          },
          std::size_t{1} << 20);
    } catch (const Found &) {
      return res;
    }
  }
  return res;
}

}  // namespace pgv
