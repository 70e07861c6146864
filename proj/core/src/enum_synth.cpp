#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>
#include <unordered_set>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "pgv/minilang.hpp"
#include "pgv/oracles.hpp"

namespace pgv {

std::vector<uint64_t> mine_constants(const std::string & text)
{
  std::vector<uint64_t> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    bool starts = std::isdigit(c)
                  && (i == 0
                      || !(std::isalnum(static_cast<unsigned char>(text[i - 1]))
                           || text[i - 1] == '_'));
    if (!starts) {
      ++i;
      continue;
    }
    std::size_t j = i;
    int base = 10;
    if (text[i] == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
      base = 16;
      j += 2;
    }
    std::size_t b = j;
    while (j < text.size() && std::isxdigit(static_cast<unsigned char>(text[j]))
           && (base == 16 || std::isdigit(static_cast<unsigned char>(text[j])))) {
      ++j;
    }
    if (j > b && j - b <= (base == 16 ? 16u : 19u)) {
      uint64_t v = std::stoull(text.substr(b, j - b), nullptr, base);
      if (std::find(out.begin(), out.end(), v) == out.end()) {
        out.push_back(v);
      }
    }
    while (j < text.size()
           && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
      ++j;
    }
    i = j;
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Term
{
  Expr e;
  int type;  // index into Enumerator::types_
  unsigned size;
  unsigned depth;
  bool pre_only;
  std::vector<uint64_t> vals;  // one per example point
};

struct SigHash
{
  std::size_t operator()(const std::pair<int, std::vector<uint64_t>> & k) const
  {
    uint64_t h = 1469598103934665603ull ^ static_cast<uint64_t>(k.first);
    for (uint64_t v : k.second) {
      h = (h ^ v) * 1099511628211ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

Expr strip_old(const Expr & e)
{
  switch (e.op()) {
    case Op::Old: return Expr::var(e.name());
    case Op::BoolLit:
    case Op::IntLit:
    case Op::Var: return e;
    case Op::Select: return Expr::select(strip_old(e.kid(0)), e.name());
    case Op::Not: return Expr::lnot(strip_old(e.kid(0)));
    case Op::Ite:
      return Expr::ite(strip_old(e.kid(0)), strip_old(e.kid(1)), strip_old(e.kid(2)));
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      return Expr::compare(e.op(), strip_old(e.kid(0)), strip_old(e.kid(1)),
                           e.is_signed_cmp());
    default: return Expr::binary(e.op(), strip_old(e.kid(0)), strip_old(e.kid(1)));
  }
}

class Enumerator
{
 public:
  Enumerator(const SynthTask & task, const SynthBudget & b)
      : task_(task), budget_(b), deadline_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                 std::chrono::duration<double>(b.wall_clock_s)))
  {
    for (const auto & x : task.positive) {
      points_.push_back(&x);
    }
    for (const auto & x : task.negative) {
      points_.push_back(&x);
    }
    npos_ = task.positive.size();
    types_.push_back(SemType::boolean());
    // offer() never exceeds max_candidates, so references into terms_ stay
    // valid while growing.
    terms_.reserve(b.max_candidates + 1);
  }

  Contract run()
  {
    const VarContext & ctx = *task_.ctx;
    for (const auto & p : task_.positive) {
      for (const auto & n : task_.negative) {
        if (p.pre == n.pre && p.post == n.post) {
          throw NoCandidate("contradictory examples: " + p.str() + " is also negative");
        }
      }
    }
    if (task_.negative.empty()) {
      return {Expr::bool_lit(true), Expr::bool_lit(true)};
    }
    add_leaves(ctx);
    by_size_.resize(budget_.max_size + 1);
    for (unsigned s = 1; s <= budget_.max_size; ++s) {
      if (s > 1) {
        grow(s);
      }
      if (auto c = solve()) {
        return *c;
      }
      if (exhausted_) {
        break;
      }
    }
    throw NoCandidate("no contract within " + std::to_string(terms_.size())
                      + " enumerated terms");
  }

 private:
  int type_id(const SemType & t)
  {
    for (std::size_t i = 0; i < types_.size(); ++i) {
      if (types_[i] == t) {
        return static_cast<int>(i);
      }
    }
    types_.push_back(t);
    return static_cast<int>(types_.size() - 1);
  }

  bool budget_left()
  {
    if (terms_.size() >= budget_.max_candidates) {
      exhausted_ = true;
    } else if ((++ticks_ & 1023) == 0 && Clock::now() > deadline_) {
      exhausted_ = true;
    }
    return !exhausted_;
  }

  // Adds a term unless an observationally equivalent one exists.
  void offer(Expr e, int type, unsigned size, unsigned depth, bool pre_only,
             std::vector<uint64_t> vals)
  {
    if (size > budget_.max_size || depth > budget_.max_depth || !budget_left()) {
      return;
    }
    auto key = std::make_pair(type, std::move(vals));
    if (pre_only) {
      if (pre_sigs_.count(key)) {
        return;
      }
      pre_sigs_.insert(key);
      all_sigs_.insert(key);
    } else if (!all_sigs_.insert(key).second) {
      return;
    }
    by_size_[size].push_back(terms_.size());
    terms_.push_back({std::move(e), type, size, depth, pre_only, std::move(key.second)});
  }

  void add_leaves(const VarContext & ctx)
  {
    std::set<std::string> iface = task_.procedure->vars();
    by_size_.resize(budget_.max_size + 1);
    for (bool old : {true, false}) {
      for (std::size_t i = 0; i < ctx.slots().size(); ++i) {
        const Slot & s = ctx.slots()[i];
        const std::string & v = ctx.name(s.var);
        if (!iface.count(v)) {
          continue;
        }
        Expr e = old ? Expr::old(v) : Expr::var(v);
        const SemType * t = &ctx.type(s.var);
        for (int f : s.fields) {
          const Field & fd = t->fields()[static_cast<std::size_t>(f)];
          e = Expr::select(e, fd.name);
          t = &fd.type;
        }
        std::vector<uint64_t> vals;
        for (const auto * p : points_) {
          vals.push_back(old ? p->pre.slot(i) : p->post.slot(i));
        }
        offer(e, type_id(s.type), 1, 1, old, std::move(vals));
      }
    }

    std::string text = task_.procedure->source;
    if (task_.procedure->mini) {
      text += "\n" + print_mini(*task_.procedure->mini);
    }
    std::vector<uint64_t> mined = mine_constants(text);
    std::vector<int> int_types;
    for (std::size_t i = 1; i < types_.size(); ++i) {
      int_types.push_back(static_cast<int>(i));
    }
    for (int ti : int_types) {
      SemType t = types_[static_cast<std::size_t>(ti)];
      std::vector<uint64_t> cs{0, 1, t.mask()};
      if (t.is_signed()) {
        cs.push_back(t.mask() >> 1);
        cs.push_back((t.mask() >> 1) + 1);
      }
      for (uint64_t m : mined) {
        if (m <= t.mask() && (!t.is_signed() || m <= (t.mask() >> 1))) {
          cs.push_back(m);
        }
      }
      for (uint64_t c : cs) {
        offer(Expr::int_lit(t, c & t.mask()), ti, 1, 1, true,
              std::vector<uint64_t>(points_.size(), c & t.mask()));
      }
      // Values seen in the examples, at a higher cost.
      std::vector<uint64_t> seen;
      for (std::size_t i = 0; i < ctx.slots().size(); ++i) {
        const Slot & s = ctx.slots()[i];
        if (s.type != t || !iface.count(ctx.name(s.var))) {
          continue;
        }
        for (const auto * p : points_) {
          for (uint64_t v : {p->pre.slot(i), p->post.slot(i)}) {
            if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
              seen.push_back(v);
            }
          }
        }
      }
      std::sort(seen.begin(), seen.end());
      if (seen.size() > 16) {
        seen.resize(16);
      }
      for (uint64_t c : seen) {
        offer(Expr::int_lit(t, c), ti, 2, 1, true,
              std::vector<uint64_t>(points_.size(), c));
      }
    }
  }

  static uint64_t arith(Op op, uint64_t a, uint64_t b, uint64_t mask)
  {
    switch (op) {
      case Op::Add: return (a + b) & mask;
      case Op::Sub: return (a - b) & mask;
      default: return (a * b) & mask;
    }
  }

  static bool compare(Op op, uint64_t a, uint64_t b, const SemType & t)
  {
    if (t.is_signed()) {
      int64_t x = sign_extend(a, t.width()), y = sign_extend(b, t.width());
      return op == Op::Lt ? x < y : x <= y;
    }
    return op == Op::Lt ? a < b : a <= b;
  }

  void grow(unsigned s)
  {
    const std::size_t n = points_.size();
    // Not
    for (std::size_t ai : snapshot(s - 1)) {
      const Term & a = terms_[ai];
      if (a.type != 0 || a.e.op() == Op::Not) {
        continue;
      }
      std::vector<uint64_t> v(n);
      for (std::size_t k = 0; k < n; ++k) {
        v[k] = a.vals[k] ^ 1;
      }
      offer(Expr::lnot(a.e), 0, s, a.depth + 1, a.pre_only, std::move(v));
    }
    // Binary operators
    for (unsigned i = 1; i + 1 < s; ++i) {
      unsigned j = s - 1 - i;
      auto left = snapshot(i), right = snapshot(j);
      for (std::size_t ai : left) {
        for (std::size_t bi : right) {
          if (exhausted_) {
            return;
          }
          const Term & a = terms_[ai];
          const Term & b = terms_[bi];
          if (a.type != b.type) {
            continue;
          }
          bool commutative_dup = i == j && ai > bi;
          bool both_const = a.e.op() == Op::IntLit && b.e.op() == Op::IntLit;
          unsigned depth = std::max(a.depth, b.depth) + 1;
          bool pre_only = a.pre_only && b.pre_only;
          const SemType & t = types_[static_cast<std::size_t>(a.type)];
          std::vector<uint64_t> v(n);
          if (t.is_bool()) {
            if (commutative_dup || ai == bi) {
              continue;
            }
            for (Op op : {Op::And, Op::Or, Op::Eq}) {
              for (std::size_t k = 0; k < n; ++k) {
                uint64_t x = a.vals[k], y = b.vals[k];
                v[k] = op == Op::And ? (x & y) : op == Op::Or ? (x | y) : (x == y);
              }
              offer(Expr::binary(op, a.e, b.e), 0, s, depth, pre_only, v);
            }
            continue;
          }
          if (both_const || ai == bi) {
            continue;
          }
          // Integer comparisons
          for (Op op : {Op::Eq, Op::Neq, Op::Lt, Op::Le}) {
            if ((op == Op::Eq || op == Op::Neq) && commutative_dup) {
              continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
              uint64_t x = a.vals[k], y = b.vals[k];
              v[k] = op == Op::Eq ? x == y : op == Op::Neq ? x != y : compare(op, x, y, t);
            }
            Expr e = (op == Op::Eq || op == Op::Neq)
                         ? Expr::binary(op, a.e, b.e)
                         : Expr::compare(op, a.e, b.e, t.is_signed());
            offer(e, 0, s, depth, pre_only, v);
          }
          // Integer arithmetic
          for (Op op : {Op::Add, Op::Sub}) {
            if (op == Op::Add && commutative_dup) {
              continue;
            }
            if (op == Op::Sub && b.e.op() == Op::IntLit && b.e.lit_bits() == 0) {
              continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
              v[k] = arith(op, a.vals[k], b.vals[k], t.mask());
            }
            offer(Expr::binary(op, a.e, b.e), a.type, s, depth, pre_only, v);
          }
        }
      }
    }
    // if-then-else over integers
    for (unsigned ci = 3; ci + 3 <= s; ++ci) {
      for (unsigned ti = 1; ci + ti + 2 <= s; ++ti) {
        unsigned ei = s - 1 - ci - ti;
        auto conds = snapshot(ci), thens = snapshot(ti), elses = snapshot(ei);
        for (std::size_t c : conds) {
          if (terms_[c].type != 0) {
            continue;
          }
          for (std::size_t a : thens) {
            if (terms_[a].type == 0) {
              continue;
            }
            for (std::size_t b : elses) {
              if (exhausted_) {
                return;
              }
              if (terms_[b].type != terms_[a].type || a == b) {
                continue;
              }
              const Term & tc = terms_[c];
              const Term & ta = terms_[a];
              const Term & tb = terms_[b];
              std::vector<uint64_t> v(n);
              for (std::size_t k = 0; k < n; ++k) {
                v[k] = tc.vals[k] ? ta.vals[k] : tb.vals[k];
              }
              offer(Expr::ite(tc.e, ta.e, tb.e), ta.type, s,
                    std::max({tc.depth, ta.depth, tb.depth}) + 1,
                    tc.pre_only && ta.pre_only && tb.pre_only, std::move(v));
            }
          }
        }
      }
    }
  }

  std::vector<std::size_t> snapshot(unsigned size) const
  {
    return size < by_size_.size() ? by_size_[size] : std::vector<std::size_t>{};
  }

  // Bool terms in enumeration order.
  std::vector<std::size_t> bool_terms() const
  {
    std::vector<std::size_t> out;
    for (const auto & level : by_size_) {
      for (std::size_t i : level) {
        if (terms_[i].type == 0) {
          out.push_back(i);
        }
      }
    }
    return out;
  }

  // Q for the positives selected by `relevant` (indices < npos_).
  std::optional<Expr> find_post(const std::vector<std::size_t> & atoms,
                                const std::vector<bool> & relevant) const
  {
    const std::size_t nneg = points_.size() - npos_;
    std::vector<std::size_t> ok;
    for (std::size_t i : atoms) {
      const Term & t = terms_[i];
      bool good = true;
      for (std::size_t k = 0; k < npos_ && good; ++k) {
        good = !relevant[k] || t.vals[k];
      }
      if (good) {
        ok.push_back(i);
      }
    }
    for (std::size_t i : ok) {
      bool all = true;
      for (std::size_t k = 0; k < nneg && all; ++k) {
        all = !terms_[i].vals[npos_ + k];
      }
      if (all) {
        return terms_[i].e;
      }
    }
    std::vector<bool> covered(nneg, false);
    std::size_t left = nneg;
    std::vector<std::size_t> chosen;
    while (left > 0) {
      std::size_t best = 0, best_gain = 0;
      for (std::size_t i : ok) {
        std::size_t gain = 0;
        for (std::size_t k = 0; k < nneg; ++k) {
          gain += !covered[k] && !terms_[i].vals[npos_ + k];
        }
        if (gain > best_gain) {
          best = i;
          best_gain = gain;
        }
      }
      if (best_gain == 0) {
        return std::nullopt;
      }
      chosen.push_back(best);
      for (std::size_t k = 0; k < nneg; ++k) {
        if (!terms_[best].vals[npos_ + k] && !covered[k]) {
          covered[k] = true;
          --left;
        }
      }
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<Expr> parts;
    for (std::size_t i : chosen) {
      parts.push_back(terms_[i].e);
    }
    return conjunction(parts);
  }

  std::optional<Contract> solve() const
  {
    auto atoms = bool_terms();
    std::vector<bool> all(npos_, true);
    if (auto q = find_post(atoms, all)) {
      return Contract{Expr::bool_lit(true), *q};
    }
    // Preconditions: pre-state atoms true on every negative pre-state.
    std::size_t tried = 0;
    for (std::size_t pi : atoms) {
      const Term & p = terms_[pi];
      if (!p.pre_only || p.e.op() == Op::BoolLit) {
        continue;
      }
      bool on_neg = true;
      for (std::size_t k = npos_; k < points_.size() && on_neg; ++k) {
        on_neg = p.vals[k] != 0;
      }
      if (!on_neg) {
        continue;
      }
      std::vector<bool> rel(npos_);
      bool restricts = false;
      for (std::size_t k = 0; k < npos_; ++k) {
        rel[k] = p.vals[k] != 0;
        restricts = restricts || !rel[k];
      }
      if (!restricts) {
        continue;
      }
      if (auto q = find_post(atoms, rel)) {
        return Contract{strip_old(p.e), *q};
      }
      if (++tried >= 32) {
        break;
      }
    }
    return std::nullopt;
  }

  const SynthTask & task_;
  SynthBudget budget_;
  Clock::time_point deadline_;
  std::vector<const ExamplePair *> points_;
  std::size_t npos_ = 0;
  std::vector<SemType> types_;
  std::vector<Term> terms_;
  std::vector<std::vector<std::size_t>> by_size_;
  std::unordered_set<std::pair<int, std::vector<uint64_t>>, SigHash> all_sigs_, pre_sigs_;
  bool exhausted_ = false;
  uint64_t ticks_ = 0;
};

}  // namespace

Contract EnumSynthesizer::synthesize(const SynthTask & task, const SynthBudget & b)
{
  if (!task.procedure || !task.ctx) {
    throw OracleError("synthesis task without procedure or context");
  }
  Enumerator en(task, b);
  Contract c = en.run();
  check_contract(c, *task.ctx);
  return c;
}

}  // namespace pgv
