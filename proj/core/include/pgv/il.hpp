#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "pgv/expr.hpp"
#include "pgv/types.hpp"

namespace pgv {

// The contract language: concrete syntax, type checking and the reference
// interpreter. The grammar is documented in docs/il_grammar.md.

/// Parses and type-checks `text`. Throws SyntaxError, TypeError,
/// UnknownVariable or OldInPrecondition.
Expr parse_expr(std::string_view text, const VarContext & ctx, Position pos);

/// Parses a Bool-typed predicate.
Expr parse_predicate(std::string_view text, const VarContext & ctx,
                     Position pos);

Contract parse_contract(std::string_view pre, std::string_view post,
                        const VarContext & ctx);

/// Returns the type of `e`; rejects mixed widths and mismatched signedness.
SemType typecheck(const Expr & e, const VarContext & ctx, Position pos);

/// Checks both sides of a contract are Bool predicates in their positions.
void check_contract(const Contract & c, const VarContext & ctx);

/// Canonical text; parse_expr(pretty_print(e)) == e.
std::string pretty_print(const Expr & e);

/// Like pretty_print, for text that is parsed against an expected type (so a
/// top-level literal needs no suffix).
std::string pretty_print_in_context(const Expr & e);

struct FreeVars
{
  std::set<std::string> pre;   // names under old(...)
  std::set<std::string> post;  // plain variable references
};

FreeVars free_vars(const Expr & e);

/// Reference denotation. `post == nullptr` evaluates in pre-state position.
/// Throws MissingPostState when old(...) appears and no post-state is given.
Value eval(const Expr & e, const Assignment & pre, const Assignment * post);

inline bool holds_pre(const Expr & p, const Assignment & d)
{
  return eval(p, d, nullptr).as_bool();
}

inline bool holds_post(const Expr & q, const Assignment & d,
                       const Assignment & d_post)
{
  return eval(q, d, &d_post).as_bool();
}

/// Rewrites record equality into field-wise conjunctions and pushes field
/// selection through ite, so every remaining leaf is a scalar access path
/// below a Var or Old. The result has no record-typed subterms.
Expr flatten_records(const Expr & e, const VarContext & ctx);

/// Names of variables referenced by `e` (both positions).
std::set<std::string> referenced_vars(const Expr & e);

}  // namespace pgv
