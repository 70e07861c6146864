#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pgv {

enum class TypeKind
{
  Bool,
  UInt,
  SInt,
  Record
};

struct Field;

/// Semantic type of a contract-language term. Integers are fixed-width
/// bitvectors (1..64 bits) with an explicit signedness; records are ordered
/// named aggregates.
class SemType
{
 public:
  SemType();  // Bool

  static SemType boolean();
  static SemType uint(unsigned width);
  static SemType sint(unsigned width);
  static SemType integer(unsigned width, bool is_signed);
  static SemType record(std::vector<Field> fields);

  /// Parses `bool`, `u<w>`, `i<w>` or `{ name: type, ... }`.
  static SemType parse(std::string_view text);

  TypeKind kind() const { return kind_; }
  unsigned width() const { return width_; }
  bool is_bool() const { return kind_ == TypeKind::Bool; }
  bool is_integer() const
  {
    return kind_ == TypeKind::UInt || kind_ == TypeKind::SInt;
  }
  bool is_signed() const { return kind_ == TypeKind::SInt; }
  bool is_record() const { return kind_ == TypeKind::Record; }
  bool is_scalar() const { return !is_record(); }

  const std::vector<Field> & fields() const;
  /// Index of `name` among the record fields, or -1.
  int field_index(std::string_view name) const;
  const SemType * field_type(std::string_view name) const;

  /// Number of scalar leaves when flattened (1 for scalars).
  std::size_t slot_count() const;
  /// Number of bits needed to enumerate the domain.
  unsigned domain_bits() const;
  /// All-ones mask for integer widths; 1 for Bool.
  uint64_t mask() const;

  std::string str() const;

  friend bool operator==(const SemType & a, const SemType & b);
  friend bool operator!=(const SemType & a, const SemType & b)
  {
    return !(a == b);
  }

 private:
  TypeKind kind_;
  unsigned width_;
  std::shared_ptr<const std::vector<Field>> fields_;
};

struct Field
{
  std::string name;
  SemType type;
};

/// A concrete value of some SemType. Scalars are stored as raw bits: Bool as
/// 0/1, integers masked to their width (two's-complement for SInt).
class Value
{
 public:
  Value();  // false

  static Value boolean(bool b);
  static Value uint(unsigned width, uint64_t v);
  static Value sint(unsigned width, int64_t v);
  /// Masks `bits` to the width of `type` (scalar types only).
  static Value from_bits(const SemType & type, uint64_t bits);
  static Value record(const SemType & type, std::vector<Value> fields);
  /// All-zero value of `type`.
  static Value zero(const SemType & type);

  const SemType & type() const { return type_; }
  uint64_t bits() const { return bits_; }
  bool as_bool() const { return bits_ != 0; }
  /// Sign-extended payload of an SInt value.
  int64_t as_signed() const;
  const std::vector<Value> & fields() const { return fields_; }
  const Value & field(std::string_view name) const;

  std::string str() const;

  friend bool operator==(const Value & a, const Value & b);
  friend bool operator!=(const Value & a, const Value & b)
  {
    return !(a == b);
  }

 private:
  SemType type_;
  uint64_t bits_ = 0;
  std::vector<Value> fields_;
};

int64_t sign_extend(uint64_t bits, unsigned width);

/// One scalar leaf of the flattened variable layout.
struct Slot
{
  std::size_t var;          // index of the owning variable
  std::string path;         // "count" or "request.value"
  std::vector<int> fields;  // field-index path below the variable
  SemType type;             // scalar type
};

/// The shared, typed variable set of a model. Variables keep declaration
/// order; records are flattened into scalar slots.
class VarContext
{
 public:
  VarContext() = default;
  explicit VarContext(std::vector<std::pair<std::string, SemType>> vars);

  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  const std::string & name(std::size_t i) const { return vars_[i].first; }
  const SemType & type(std::size_t i) const { return vars_[i].second; }
  const std::vector<std::pair<std::string, SemType>> & vars() const
  {
    return vars_;
  }

  std::optional<std::size_t> index_of(std::string_view name) const;
  const SemType * lookup(std::string_view name) const;
  bool contains(std::string_view name) const { return lookup(name) != nullptr; }

  const std::vector<Slot> & slots() const { return slots_; }
  /// First slot of variable `var`.
  std::size_t slot_offset(std::size_t var) const { return offsets_[var]; }
  /// Slot index of a scalar leaf reached by `fields` below `var`.
  std::size_t slot_of(std::size_t var, std::span<const int> fields) const;

  /// Copy extended with additional variables.
  VarContext extended(
      const std::vector<std::pair<std::string, SemType>> & extra) const;

  friend bool operator==(const VarContext & a, const VarContext & b)
  {
    return a.vars_ == b.vars_;
  }

 private:
  std::vector<std::pair<std::string, SemType>> vars_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> offsets_;
};

using ContextPtr = std::shared_ptr<const VarContext>;

ContextPtr make_context(std::vector<std::pair<std::string, SemType>> vars);

/// A total assignment of values to the variables of a context, stored as a
/// flat vector of scalar slots.
class Assignment
{
 public:
  Assignment() = default;
  explicit Assignment(ContextPtr ctx);  // all-zero
  Assignment(ContextPtr ctx, std::vector<uint64_t> slots);

  /// Builds an assignment from named values; unnamed variables are zero.
  static Assignment from_values(
      ContextPtr ctx, const std::map<std::string, Value> & values);

  const ContextPtr & context() const { return ctx_; }
  const std::vector<uint64_t> & slots() const { return slots_; }
  std::vector<uint64_t> & slots() { return slots_; }
  uint64_t slot(std::size_t i) const { return slots_[i]; }
  void set_slot(std::size_t i, uint64_t bits);

  Value get(std::string_view name) const;
  Value get(std::size_t var) const;
  void set(std::string_view name, const Value & v);
  void set(std::size_t var, const Value & v);

  /// "(req=1, resp=true)"
  std::string str() const;

  friend bool operator==(const Assignment & a, const Assignment & b)
  {
    return a.slots_ == b.slots_;
  }
  friend bool operator!=(const Assignment & a, const Assignment & b)
  {
    return !(a == b);
  }
  friend bool operator<(const Assignment & a, const Assignment & b)
  {
    return a.slots_ < b.slots_;
  }

 private:
  ContextPtr ctx_;
  std::vector<uint64_t> slots_;
};

/// Parses a scalar literal such as `true`, `5`, `-3` against `type`.
Value parse_scalar_value(std::string_view text, const SemType & type);

}  // namespace pgv
