#pragma once

#include <map>
#include <string>
#include <vector>

#include "pgv/expr.hpp"
#include "pgv/types.hpp"

namespace pgv {

/// How a contract variable is reached in target code.
enum class AccessStyle
{
  Direct,   // `x`, `x.f`
  Pointer,  // `(*x)`, `x->f`
  Port      // `x->value` for scalars, `x->f` for records (LF-style ports)
};

struct NameBinding
{
  std::string target;
  AccessStyle style = AccessStyle::Direct;
};

/// Target names for contract variables. `post` serves plain references (the
/// current state), `pre` serves old(...).
struct NameMap
{
  std::map<std::string, NameBinding> pre;
  std::map<std::string, NameBinding> post;

  /// v -> v and old(v) -> <pre_prefix>v, all direct.
  static NameMap identity(const VarContext & ctx,
                          const std::string & pre_prefix = "old_");
};

std::string compile_to_c(const Expr & e, const VarContext & ctx,
                         const NameMap & m);
std::string compile_to_rust(const Expr & e, const VarContext & ctx,
                            const NameMap & m);
/// SMT-LIB v2 term. Record leaves become symbols `<target>.<field>...`.
std::string compile_to_smt(const Expr & e, const VarContext & ctx,
                           const NameMap & m);

/// SMT-LIB sort of a scalar type: `Bool` or `(_ BitVec w)`.
std::string smt_sort(const SemType & t);
/// SMT-LIB constant for scalar bits of type `t`.
std::string smt_value(const SemType & t, uint64_t bits);
/// Quotes `name` with |...| when it is not a simple SMT-LIB symbol.
std::string smt_symbol(const std::string & name);
/// Symbol compile_to_smt uses for scalar slot `slot` of `ctx` when the
/// owning variable maps to `target`.
std::string smt_slot_symbol(const VarContext & ctx, std::size_t slot,
                            const std::string & target);

/// C type used to hold a scalar of type `t` (`_Bool`, `uint8_t`, `int16_t`...).
std::string c_type(const SemType & t);
/// Rust type used to hold a scalar of type `t`.
std::string rust_type(const SemType & t);

// ---------------------------------------------------------------------------
// Harnesses

enum class VarRole
{
  Input,
  Output,
  State
};

struct HarnessVar
{
  std::string name;  // contract variable
  SemType type;
  VarRole role = VarRole::State;
  NameBinding binding;     // target access; empty target means `name`
  std::string target_type; // struct type for records/ports; derived for scalars
  bool declare = true;     // emit a declaration in the harness
};

struct HarnessSpec
{
  std::string entry;
  std::string procedure_source;
  std::string preamble;
  std::vector<HarnessVar> vars;
  Contract contract;
  /// Names initialized nondeterministically; empty means every variable.
  std::vector<std::string> nondet;
  /// Call statement replacing the default (`entry();` in C, `entry(...)` in
  /// Rust with inputs by value and the rest by `&mut`).
  std::string call;
};

/// Complete C translation unit for CBMC. Every variable is snapshotted into
/// `old_<name>` before the call and probed into `new_<name>` after it.
std::string emit_cbmc_harness(const HarnessSpec & h);

/// Complete Rust source with a `#[kani::proof]` harness `check_<entry>`.
std::string emit_kani_harness(const HarnessSpec & h);

/// Context of the harness variables (declaration order).
VarContext harness_context(const HarnessSpec & h);

}  // namespace pgv
