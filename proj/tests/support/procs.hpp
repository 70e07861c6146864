#pragma once

#include "pgv/minilang.hpp"
#include "pgv/model.hpp"

namespace pgv::testgen {

/// A mini procedure whose footprint is what its body touches.
inline ProcedureRef mini_proc(const std::string & name, const std::string & text, ContextPtr ctx)
{
  ProcedureRef f;
  f.name = name;
  f.language = Language::Mini;
  f.source = text;
  f.mini = std::make_shared<MiniProc>(parse_mini(text, ctx, name));
  f.writes = mini_writes(*f.mini);
  for (const auto & v : mini_vars(*f.mini)) {
    if (!f.writes.count(v)) {
      f.reads.insert(v);
    }
  }
  return f;
}

}  // namespace pgv::testgen
