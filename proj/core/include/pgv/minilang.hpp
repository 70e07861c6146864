#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pgv/compiled.hpp"
#include "pgv/expr.hpp"
#include "pgv/types.hpp"

namespace pgv {

// A loop-free procedure language with havoc. Grammar in docs/mini_grammar.md.

struct MiniStmt
{
  enum class Kind
  {
    Assign,
    Havoc,
    If,
    Skip
  };

  Kind kind = Kind::Skip;
  std::string var;                // Assign/Havoc target variable
  std::vector<std::string> path;  // field path below `var`
  Expr rhs;                       // Assign; pre position over the current state
  Expr cond;                      // If
  std::vector<MiniStmt> then_body;
  std::vector<MiniStmt> else_body;
  // Havoc range (inclusive, raw bits in the target's type); full domain if
  // absent. Only for scalar targets.
  std::optional<std::pair<uint64_t, uint64_t>> range;

  friend bool operator==(const MiniStmt & a, const MiniStmt & b);
};

struct MiniProc
{
  std::string name;
  ContextPtr ctx;
  std::vector<MiniStmt> body;

  friend bool operator==(const MiniProc & a, const MiniProc & b)
  {
    return a.body == b.body;
  }
};

MiniProc parse_mini(std::string_view text, ContextPtr ctx, std::string name = "");
std::string print_mini(const MiniProc & p);

/// Variables assigned or havocked.
std::set<std::string> mini_writes(const MiniProc & p);
/// Variables read or written.
std::set<std::string> mini_vars(const MiniProc & p);

/// Every post-state reachable from `d`, sorted and deduplicated. Throws
/// RangeTooLarge when more than `cap` states (or 16 * cap paths) arise.
std::vector<Assignment> exec_mini(const MiniProc & p, const Assignment & d,
                                  std::size_t cap = std::size_t{1} << 16);

/// Resolves each havoc by `choose(n)`, which returns an index below n.
Assignment run_mini(const MiniProc & p, const Assignment & d,
                    const std::function<uint64_t(uint64_t)> & choose);

/// Whether `post` is among the states reachable from `pre`.
bool mini_can_produce(const MiniProc & p, const Assignment & pre,
                      const Assignment & post);

struct BruteResult
{
  bool pass = true;
  Assignment pre;
  Assignment post;
  uint64_t states_checked = 0;
};

/// Exhaustive check of {P} p {Q} over the variables p or the contract touch;
/// other variables stay zero (they cannot affect the outcome). Throws
/// DomainTooLarge when those variables need more than `max_bits` bits.
BruteResult brute_verify(const Contract & c, const MiniProc & p,
                         unsigned max_bits = 22);

/// Slot-level interpreter behind exec_mini/run_mini, reusable in hot loops.
class MiniExecutor
{
 public:
  explicit MiniExecutor(const MiniProc & p);

  /// Calls `out` for every path's final state (duplicates possible).
  void each(const std::vector<uint64_t> & d,
            const std::function<void(const std::vector<uint64_t> &)> & out,
            std::size_t path_cap) const;

  std::vector<uint64_t> run(std::vector<uint64_t> d,
                            const std::function<uint64_t(uint64_t)> & choose) const;

 private:
  struct Step
  {
    MiniStmt::Kind kind;
    std::size_t slot_begin = 0;  // target slots
    std::size_t slot_count = 0;
    bool scalar_rhs = true;
    CompiledExpr rhs;            // scalar Assign / If condition
    Expr rhs_expr;               // record-valued Assign
    uint64_t lo = 0, count = 0;  // Havoc range on a scalar target
    std::vector<SemType> leaf_types;  // Havoc over a record target
    std::vector<Step> then_body, else_body;
  };

  std::vector<Step> lower(const std::vector<MiniStmt> & body) const;
  void exec(const std::vector<Step> & body, std::size_t i,
            std::vector<uint64_t> & s,
            const std::function<void(std::vector<uint64_t> &)> & k) const;

  const MiniProc * proc_;
  std::vector<Step> body_;
};

}  // namespace pgv
