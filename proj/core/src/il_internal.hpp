#pragma once

// Untyped syntax trees and bidirectional elaboration into typed Exprs.
// Shared with the mini-language parser, which embeds contract expressions.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lexer.hpp"
#include "pgv/expr.hpp"

namespace pgv::detail {

enum class CmpSign
{
  Infer,
  Unsigned,
  Signed
};

struct Syn
{
  Op op = Op::BoolLit;
  bool bool_value = false;
  uint64_t value = 0;
  bool negative = false;
  std::optional<SemType> suffix;
  CmpSign sign = CmpSign::Infer;
  std::string name;
  std::vector<Syn> kids;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Parses one expression from `ts`, stopping at the first token that cannot
/// continue it.
Syn parse_syn(TokenStream & ts);

/// Elaborates `s` with an optional expected type.
Expr elaborate(const Syn & s, const VarContext & ctx, Position pos,
               const std::optional<SemType> & expected, std::string_view text);

}  // namespace pgv::detail
