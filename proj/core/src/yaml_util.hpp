#pragma once

// Helpers shared by the model and project file readers.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "pgv/error.hpp"

namespace pgv::yaml_util {

[[noreturn]] inline void fail(const YAML::Node & n, const std::string & msg)
{
  if (n.IsDefined() && n.Mark().line >= 0) {
    throw ModelError("line " + std::to_string(n.Mark().line + 1) + ": " + msg);
  }
  throw ModelError(msg);
}

inline std::string scalar(const YAML::Node & n, const std::string & what)
{
  if (!n.IsScalar()) {
    fail(n, what + " must be a scalar");
  }
  return n.as<std::string>();
}

inline uint64_t unsigned_value(const YAML::Node & n, const std::string & what)
{
  std::string s = scalar(n, what);
  try {
    std::size_t used = 0;
    if (!s.empty() && s[0] == '-') {
      throw std::invalid_argument(s);
    }
    uint64_t v = std::stoull(s, &used, 0);
    if (used != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception &) {
    fail(n, what + " must be a nonnegative integer, got '" + s + "'");
  }
}

inline std::vector<std::string> string_list(const YAML::Node & n, const std::string & what)
{
  std::vector<std::string> out;
  if (!n.IsDefined() || n.IsNull()) {
    return out;
  }
  if (n.IsScalar()) {
    out.push_back(n.as<std::string>());
    return out;
  }
  if (!n.IsSequence()) {
    fail(n, what + " must be a list");
  }
  for (const auto & x : n) {
    out.push_back(scalar(x, what + " entry"));
  }
  return out;
}

inline void check_keys(const YAML::Node & n, std::initializer_list<const char *> allowed,
                const std::string & what)
{
  for (const auto & kv : n) {
    std::string k = kv.first.as<std::string>();
    bool ok = false;
    for (const char * a : allowed) {
      ok = ok || k == a;
    }
    if (!ok) {
      fail(kv.first, "unknown key '" + k + "' in " + what);
    }
  }
}

template <class F>
auto wrap_il(const YAML::Node & n, const std::string & what, F && f)
{
  try {
    return f();
  } catch (const IlError & e) {
    fail(n, what + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw ModelError("cannot read '" + p.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pgv::yaml_util
