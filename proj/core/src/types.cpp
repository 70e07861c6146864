#include "pgv/types.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "pgv/error.hpp"

namespace pgv {

namespace {

void check_width(unsigned width)
{
  if (width < 1 || width > 64) {
    throw TypeError("integer type", "width in 1..64",
                    std::to_string(width));
  }
}

const std::vector<Field> kNoFields;

}  // namespace

// ---------------------------------------------------------------------------
// SemType

SemType::SemType() : kind_(TypeKind::Bool), width_(1) {}

SemType SemType::boolean() { return SemType(); }

SemType SemType::uint(unsigned width)
{
  check_width(width);
  SemType t;
  t.kind_ = TypeKind::UInt;
  t.width_ = width;
  return t;
}

SemType SemType::sint(unsigned width)
{
  check_width(width);
  SemType t;
  t.kind_ = TypeKind::SInt;
  t.width_ = width;
  return t;
}

SemType SemType::integer(unsigned width, bool is_signed)
{
  return is_signed ? sint(width) : uint(width);
}

SemType SemType::record(std::vector<Field> fields)
{
  if (fields.empty()) {
    throw TypeError("record type", "at least one field", "none");
  }
  std::set<std::string> seen;
  for (const auto & f : fields) {
    if (f.name.empty()) {
      throw TypeError("record type", "non-empty field name", "\"\"");
    }
    if (!seen.insert(f.name).second) {
      throw TypeError("record type", "unique field names",
                      "duplicate '" + f.name + "'");
    }
  }
  SemType t;
  t.kind_ = TypeKind::Record;
  t.width_ = 0;
  t.fields_ = std::make_shared<const std::vector<Field>>(std::move(fields));
  return t;
}

const std::vector<Field> & SemType::fields() const
{
  return fields_ ? *fields_ : kNoFields;
}

int SemType::field_index(std::string_view name) const
{
  const auto & fs = fields();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].name == name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

const SemType * SemType::field_type(std::string_view name) const
{
  int i = field_index(name);
  return i < 0 ? nullptr : &fields()[i].type;
}

std::size_t SemType::slot_count() const
{
  if (!is_record()) {
    return 1;
  }
  std::size_t n = 0;
  for (const auto & f : fields()) {
    n += f.type.slot_count();
  }
  return n;
}

unsigned SemType::domain_bits() const
{
  if (!is_record()) {
    return width_;
  }
  unsigned n = 0;
  for (const auto & f : fields()) {
    n += f.type.domain_bits();
  }
  return n;
}

uint64_t SemType::mask() const
{
  if (width_ >= 64) {
    return ~uint64_t{0};
  }
  return (uint64_t{1} << width_) - 1;
}

std::string SemType::str() const
{
  switch (kind_) {
    case TypeKind::Bool: return "bool";
    case TypeKind::UInt: return "u" + std::to_string(width_);
    case TypeKind::SInt: return "i" + std::to_string(width_);
    case TypeKind::Record: {
      std::string s = "{ ";
      bool first = true;
      for (const auto & f : fields()) {
        if (!first) {
          s += ", ";
        }
        first = false;
        s += f.name + ": " + f.type.str();
      }
      return s + " }";
    }
  }
  return "?";
}

bool operator==(const SemType & a, const SemType & b)
{
  if (a.kind_ != b.kind_) {
    return false;
  }
  if (a.kind_ != TypeKind::Record) {
    return a.width_ == b.width_;
  }
  const auto & fa = a.fields();
  const auto & fb = b.fields();
  if (fa.size() != fb.size()) {
    return false;
  }
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fa[i].name != fb[i].name || fa[i].type != fb[i].type) {
      return false;
    }
  }
  return true;
}

namespace {

struct TypeParser
{
  std::string_view s;
  std::size_t i = 0;

  void skip_ws()
  {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    }
  }

  std::string ident()
  {
    skip_ws();
    std::size_t start = i;
    while (i < s.size()
           && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
      ++i;
    }
    if (start == i) {
      throw SyntaxError("expected identifier in type", i);
    }
    return std::string(s.substr(start, i - start));
  }

  void expect(char c)
  {
    skip_ws();
    if (i >= s.size() || s[i] != c) {
      throw SyntaxError(std::string("expected '") + c + "' in type", i);
    }
    ++i;
  }

  SemType parse()
  {
    skip_ws();
    if (i < s.size() && s[i] == '{') {
      ++i;
      std::vector<Field> fields;
      while (true) {
        std::string name = ident();
        expect(':');
        SemType t = parse();
        fields.push_back({name, t});
        skip_ws();
        if (i < s.size() && s[i] == ',') {
          ++i;
          continue;
        }
        expect('}');
        break;
      }
      return SemType::record(std::move(fields));
    }
    std::string w = ident();
    if (w == "bool") {
      return SemType::boolean();
    }
    if (w.size() >= 2 && (w[0] == 'u' || w[0] == 'i')
        && std::all_of(w.begin() + 1, w.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      unsigned width = static_cast<unsigned>(std::stoul(w.substr(1)));
      return w[0] == 'u' ? SemType::uint(width) : SemType::sint(width);
    }
    throw SyntaxError("unknown type '" + w + "'", i);
  }
};

}  // namespace

SemType SemType::parse(std::string_view text)
{
  TypeParser p{text};
  SemType t = p.parse();
  p.skip_ws();
  if (p.i != text.size()) {
    throw SyntaxError("trailing characters in type", p.i);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Value

int64_t sign_extend(uint64_t bits, unsigned width)
{
  if (width >= 64) {
    return static_cast<int64_t>(bits);
  }
  uint64_t sign = uint64_t{1} << (width - 1);
  bits &= (uint64_t{1} << width) - 1;
  return static_cast<int64_t>((bits ^ sign) - sign);
}

Value::Value() = default;

Value Value::boolean(bool b)
{
  Value v;
  v.bits_ = b ? 1 : 0;
  return v;
}

Value Value::uint(unsigned width, uint64_t x)
{
  return from_bits(SemType::uint(width), x);
}

Value Value::sint(unsigned width, int64_t x)
{
  return from_bits(SemType::sint(width), static_cast<uint64_t>(x));
}

Value Value::from_bits(const SemType & type, uint64_t bits)
{
  if (type.is_record()) {
    throw TypeError("value", "scalar type", type.str());
  }
  Value v;
  v.type_ = type;
  v.bits_ = type.is_bool() ? (bits & 1) : (bits & type.mask());
  return v;
}

Value Value::record(const SemType & type, std::vector<Value> fields)
{
  if (!type.is_record() || type.fields().size() != fields.size()) {
    throw TypeError("record value", type.str(), "mismatched fields");
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].type() != type.fields()[i].type) {
      throw TypeError("record value field " + type.fields()[i].name,
                      type.fields()[i].type.str(), fields[i].type().str());
    }
  }
  Value v;
  v.type_ = type;
  v.fields_ = std::move(fields);
  return v;
}

Value Value::zero(const SemType & type)
{
  if (!type.is_record()) {
    return from_bits(type, 0);
  }
  std::vector<Value> fs;
  for (const auto & f : type.fields()) {
    fs.push_back(zero(f.type));
  }
  return record(type, std::move(fs));
}

int64_t Value::as_signed() const { return sign_extend(bits_, type_.width()); }

const Value & Value::field(std::string_view name) const
{
  int i = type_.field_index(name);
  if (i < 0) {
    throw TypeError("field access", "field of " + type_.str(),
                    std::string(name));
  }
  return fields_[static_cast<std::size_t>(i)];
}

std::string Value::str() const
{
  switch (type_.kind()) {
    case TypeKind::Bool: return bits_ ? "true" : "false";
    case TypeKind::UInt: return std::to_string(bits_);
    case TypeKind::SInt: return std::to_string(as_signed());
    case TypeKind::Record: {
      std::string s = "{";
      for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) {
          s += ", ";
        }
        s += type_.fields()[i].name + ": " + fields_[i].str();
      }
      return s + "}";
    }
  }
  return "?";
}

bool operator==(const Value & a, const Value & b)
{
  return a.type_ == b.type_ && a.bits_ == b.bits_ && a.fields_ == b.fields_;
}

Value parse_scalar_value(std::string_view text, const SemType & type)
{
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.pop_back();
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.erase(s.begin());
  }
  if (type.is_bool()) {
    if (s == "true" || s == "1" || s == "TRUE") {
      return Value::boolean(true);
    }
    if (s == "false" || s == "0" || s == "FALSE") {
      return Value::boolean(false);
    }
    throw TypeError(s, "bool", "non-boolean literal");
  }
  if (!type.is_integer() || s.empty()) {
    throw TypeError(s, type.str(), "unparseable value");
  }
  try {
    if (s[0] == '-') {
      long long v = std::stoll(s);
      return Value::from_bits(type, static_cast<uint64_t>(v));
    }
    unsigned long long v = std::stoull(s, nullptr, 0);
    return Value::from_bits(type, v);
  } catch (const std::logic_error &) {
    throw TypeError(s, type.str(), "unparseable value");
  }
}

// ---------------------------------------------------------------------------
// VarContext

namespace {

void flatten_slots(std::size_t var, const std::string & path,
                   std::vector<int> & fields, const SemType & t,
                   std::vector<Slot> & out)
{
  if (!t.is_record()) {
    out.push_back({var, path, fields, t});
    return;
  }
  const auto & fs = t.fields();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    fields.push_back(static_cast<int>(i));
    flatten_slots(var, path + "." + fs[i].name, fields, fs[i].type, out);
    fields.pop_back();
  }
}

}  // namespace

VarContext::VarContext(std::vector<std::pair<std::string, SemType>> vars)
    : vars_(std::move(vars))
{
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto & name = vars_[i].first;
    if (name.empty()) {
      throw ModelError("variable names must be non-empty");
    }
    if (!index_.emplace(name, i).second) {
      throw ModelError("duplicate variable '" + name + "'");
    }
    offsets_.push_back(slots_.size());
    std::vector<int> path;
    flatten_slots(i, name, path, vars_[i].second, slots_);
  }
}

std::optional<std::size_t> VarContext::index_of(std::string_view name) const
{
  auto it = index_.find(name);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

const SemType * VarContext::lookup(std::string_view name) const
{
  auto i = index_of(name);
  return i ? &vars_[*i].second : nullptr;
}

std::size_t VarContext::slot_of(std::size_t var,
                                std::span<const int> fields) const
{
  std::size_t slot = offsets_[var];
  const SemType * t = &vars_[var].second;
  for (int f : fields) {
    const auto & fs = t->fields();
    for (int j = 0; j < f; ++j) {
      slot += fs[static_cast<std::size_t>(j)].type.slot_count();
    }
    t = &fs[static_cast<std::size_t>(f)].type;
  }
  return slot;
}

VarContext VarContext::extended(
    const std::vector<std::pair<std::string, SemType>> & extra) const
{
  auto vars = vars_;
  vars.insert(vars.end(), extra.begin(), extra.end());
  return VarContext(std::move(vars));
}

ContextPtr make_context(std::vector<std::pair<std::string, SemType>> vars)
{
  return std::make_shared<const VarContext>(std::move(vars));
}

// ---------------------------------------------------------------------------
// Assignment

Assignment::Assignment(ContextPtr ctx)
    : ctx_(std::move(ctx)), slots_(ctx_ ? ctx_->slots().size() : 0, 0)
{
}

Assignment::Assignment(ContextPtr ctx, std::vector<uint64_t> slots)
    : ctx_(std::move(ctx)), slots_(std::move(slots))
{
  if (slots_.size() != ctx_->slots().size()) {
    throw ModelError("assignment slot count does not match context");
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    set_slot(i, slots_[i]);
  }
}

Assignment Assignment::from_values(ContextPtr ctx,
                                   const std::map<std::string, Value> & values)
{
  Assignment a(std::move(ctx));
  for (const auto & [name, v] : values) {
    a.set(name, v);
  }
  return a;
}

void Assignment::set_slot(std::size_t i, uint64_t bits)
{
  const SemType & t = ctx_->slots()[i].type;
  slots_[i] = t.is_bool() ? (bits & 1) : (bits & t.mask());
}

namespace {

Value read_value(const std::vector<uint64_t> & slots, std::size_t & pos,
                 const SemType & t)
{
  if (!t.is_record()) {
    return Value::from_bits(t, slots[pos++]);
  }
  std::vector<Value> fs;
  for (const auto & f : t.fields()) {
    fs.push_back(read_value(slots, pos, f.type));
  }
  return Value::record(t, std::move(fs));
}

void write_value(std::vector<uint64_t> & slots, std::size_t & pos,
                 const Value & v)
{
  if (!v.type().is_record()) {
    slots[pos++] = v.bits();
    return;
  }
  for (const auto & f : v.fields()) {
    write_value(slots, pos, f);
  }
}

}  // namespace

Value Assignment::get(std::size_t var) const
{
  std::size_t pos = ctx_->slot_offset(var);
  return read_value(slots_, pos, ctx_->type(var));
}

Value Assignment::get(std::string_view name) const
{
  auto i = ctx_->index_of(name);
  if (!i) {
    throw UnknownVariable(std::string(name));
  }
  return get(*i);
}

void Assignment::set(std::size_t var, const Value & v)
{
  if (v.type() != ctx_->type(var)) {
    throw TypeError(ctx_->name(var), ctx_->type(var).str(), v.type().str());
  }
  std::size_t pos = ctx_->slot_offset(var);
  write_value(slots_, pos, v);
}

void Assignment::set(std::string_view name, const Value & v)
{
  auto i = ctx_->index_of(name);
  if (!i) {
    throw UnknownVariable(std::string(name));
  }
  set(*i, v);
}

std::string Assignment::str() const
{
  std::string s = "(";
  for (std::size_t i = 0; i < ctx_->size(); ++i) {
    if (i) {
      s += ", ";
    }
    s += ctx_->name(i) + "=" + get(i).str();
  }
  return s + ")";
}

}  // namespace pgv
