#include "pgv/model_io.hpp"

#include <yaml-cpp/yaml.h>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "yaml_util.hpp"

namespace pgv {

namespace {

using namespace yaml_util;

AccessStyle parse_style(const YAML::Node & n)
{
  std::string s = scalar(n, "style");
  if (s == "direct") {
    return AccessStyle::Direct;
  }
  if (s == "pointer") {
    return AccessStyle::Pointer;
  }
  if (s == "port") {
    return AccessStyle::Port;
  }
  fail(n, "unknown access style '" + s + "' (direct, pointer or port)");
}

VarRole parse_role(const YAML::Node & n)
{
  std::string s = scalar(n, "role");
  if (s == "input") {
    return VarRole::Input;
  }
  if (s == "output") {
    return VarRole::Output;
  }
  if (s == "state") {
    return VarRole::State;
  }
  fail(n, "unknown role '" + s + "' (input, output or state)");
}

ProcedureRef parse_procedure(const std::string & name, const YAML::Node & n,
                             const ContextPtr & vars,
                             const std::filesystem::path & base_dir)
{
  if (!n.IsMap()) {
    fail(n, "procedure '" + name + "' must be a map");
  }
  check_keys(n, {"language", "source", "file", "entry", "preamble", "call",
                 "interface", "reads", "writes", "mini"},
             "procedure '" + name + "'");
  ProcedureRef p;
  p.name = name;
  if (n["language"]) {
    try {
      p.language = parse_language(scalar(n["language"], "language"));
    } catch (const ModelError & e) {
      fail(n["language"], e.what());
    }
  }
  if (n["source"] && n["file"]) {
    fail(n, "procedure '" + name + "' has both source and file");
  }
  if (n["source"]) {
    p.source = n["source"].IsNull() ? "" : scalar(n["source"], "source");
  } else if (n["file"]) {
    p.source = read_file(base_dir / scalar(n["file"], "file"));
  } else if (p.language != Language::Mini) {
    fail(n, "procedure '" + name + "' needs source or file");
  }
  p.entry = n["entry"] ? scalar(n["entry"], "entry") : name;
  if (n["preamble"]) {
    p.preamble = scalar(n["preamble"], "preamble");
  }
  if (n["call"]) {
    p.call = scalar(n["call"], "call");
  }
  for (const auto & r : string_list(n["reads"], "reads")) {
    p.reads.insert(r);
  }
  for (const auto & w : string_list(n["writes"], "writes")) {
    p.writes.insert(w);
  }

  std::string mini_text;
  if (p.language == Language::Mini) {
    mini_text = p.source;
  } else if (n["mini"]) {
    mini_text = scalar(n["mini"], "mini");
  }
  if (p.language == Language::Mini || n["mini"]) {
    const YAML::Node & where = p.language == Language::Mini
                                   ? (n["source"] ? n["source"] : n)
                                   : n["mini"];
    auto mp = wrap_il(where, "procedure '" + name + "'",
                      [&] { return parse_mini(mini_text, vars, name); });
    p.mini = std::make_shared<const MiniProc>(std::move(mp));
    if (p.language == Language::Mini) {
      auto w = mini_writes(*p.mini);
      auto all = mini_vars(*p.mini);
      p.writes.insert(w.begin(), w.end());
      for (const auto & v : all) {
        if (!w.count(v)) {
          p.reads.insert(v);
        }
      }
    }
  }

  const YAML::Node & itf = n["interface"];
  std::set<std::string> explicit_role;
  if (itf && itf.IsSequence()) {
    for (const auto & x : itf) {
      InterfaceVar iv;
      iv.var = scalar(x, "interface entry");
      p.interface.push_back(iv);
    }
  } else if (itf && itf.IsMap()) {
    for (const auto & kv : itf) {
      InterfaceVar iv;
      iv.var = kv.first.as<std::string>();
      const YAML::Node & b = kv.second;
      if (b.IsScalar()) {
        iv.binding.target = b.as<std::string>();
      } else if (b.IsMap()) {
        check_keys(b, {"target", "style", "type", "role"}, "binding of '" + iv.var + "'");
        if (b["target"]) {
          iv.binding.target = scalar(b["target"], "target");
        }
        if (b["style"]) {
          iv.binding.style = parse_style(b["style"]);
        }
        if (b["type"]) {
          iv.target_type = scalar(b["type"], "type");
        }
        if (b["role"]) {
          iv.role = parse_role(b["role"]);
          explicit_role.insert(iv.var);
        }
      } else if (!b.IsNull()) {
        fail(b, "binding of '" + iv.var + "' must be a target name or a map");
      }
      p.interface.push_back(iv);
    }
  } else if (itf) {
    fail(itf, "interface must be a list or a map");
  }
  for (auto & iv : p.interface) {
    if (!explicit_role.count(iv.var)) {
      bool r = p.reads.count(iv.var) > 0;
      bool w = p.writes.count(iv.var) > 0;
      iv.role = w && !r ? VarRole::Output : (!w && r ? VarRole::Input : VarRole::State);
    }
  }
  return p;
}

}  // namespace

LoadedModel parse_model_yaml(std::string_view text,
                             const std::filesystem::path & base_dir)
{
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception & e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
  if (!root.IsMap()) {
    throw ModelError("model file must be a map");
  }
  check_keys(root, {"name", "vars", "modes", "terminal", "init", "procedures",
                    "transitions", "property"},
             "model");

  LoadedModel out;
  PolyglotModel & m = out.model;
  m.name = root["name"] ? scalar(root["name"], "name") : "model";

  const YAML::Node & vars = root["vars"];
  if (!vars || !vars.IsMap() || vars.size() == 0) {
    fail(root, "the model needs a nonempty 'vars' map");
  }
  std::vector<std::pair<std::string, SemType>> decls;
  for (const auto & kv : vars) {
    std::string nm = kv.first.as<std::string>();
    SemType t = wrap_il(kv.second, "type of '" + nm + "'",
                        [&] { return SemType::parse(scalar(kv.second, "type")); });
    for (const auto & d : decls) {
      if (d.first == nm) {
        fail(kv.first, "variable '" + nm + "' declared twice");
      }
    }
    decls.emplace_back(nm, t);
  }
  m.vars = make_context(std::move(decls));

  m.modes = string_list(root["modes"], "modes");
  if (m.modes.empty()) {
    fail(root, "the model needs at least one mode");
  }
  for (const auto & t : string_list(root["terminal"], "terminal")) {
    m.terminal.insert(t);
  }

  const YAML::Node & procs = root["procedures"];
  if (procs && !procs.IsNull()) {
    if (!procs.IsMap()) {
      fail(procs, "procedures must be a map");
    }
    for (const auto & kv : procs) {
      std::string nm = kv.first.as<std::string>();
      if (m.procedures.count(nm)) {
        fail(kv.first, "procedure '" + nm + "' declared twice");
      }
      m.procedures.emplace(nm, parse_procedure(nm, kv.second, m.vars, base_dir));
    }
  }

  const YAML::Node & init = root["init"];
  if (!init || !init.IsMap()) {
    fail(root, "the model needs an 'init' map");
  }
  check_keys(init, {"mode", "predicate", "procedures"}, "init");
  if (!init["mode"]) {
    fail(init, "init needs a mode");
  }
  std::string init_mode = scalar(init["mode"], "init mode");
  Expr init_pred = Expr::bool_lit(true);
  if (init["predicate"]) {
    init_pred = wrap_il(init["predicate"], "init predicate", [&] {
      return parse_predicate(scalar(init["predicate"], "init predicate"), *m.vars,
                             Position::Pre);
    });
  }
  auto init_procs = string_list(init["procedures"], "init procedures");
  m.init.predicate = init_pred;
  if (init_procs.empty()) {
    m.init.mode = init_mode;
  } else {
    m.modes.insert(m.modes.begin(), kStartMode);
    m.init.mode = kStartMode;
    Transition t;
    t.id = "_init";
    t.from = kStartMode;
    t.to = init_mode;
    t.update = init_procs;
    m.transitions.push_back(t);
  }

  const YAML::Node & trs = root["transitions"];
  if (trs && !trs.IsNull()) {
    if (!trs.IsSequence()) {
      fail(trs, "transitions must be a list");
    }
    std::size_t i = 0;
    for (const auto & x : trs) {
      if (!x.IsMap()) {
        fail(x, "transition must be a map");
      }
      check_keys(x, {"id", "from", "to", "guard", "update", "duration"}, "transition");
      Transition t;
      t.id = x["id"] ? scalar(x["id"], "id") : "t" + std::to_string(i);
      if (!x["from"] || !x["to"]) {
        fail(x, "transition '" + t.id + "' needs from and to");
      }
      t.from = scalar(x["from"], "from");
      t.to = scalar(x["to"], "to");
      if (x["guard"]) {
        std::string g = scalar(x["guard"], "guard");
        t.guard = wrap_il(x["guard"], "guard of '" + t.id + "'", [&] {
          try {
            return parse_predicate(g, *m.vars, Position::Pre);
          } catch (const OldInPrecondition &) {
            // Kept for validate_model to report as OldInGuard.
            return parse_predicate(g, *m.vars, Position::Post);
          }
        });
      }
      t.update = string_list(x["update"], "update");
      if (x["duration"]) {
        t.duration = unsigned_value(x["duration"], "duration");
      }
      m.transitions.push_back(std::move(t));
      ++i;
    }
  }

  const YAML::Node & prop = root["property"];
  if (prop && !prop.IsNull()) {
    check_keys(prop, {"kind", "within", "predicate"}, "property");
    std::string kind = prop["kind"] ? scalar(prop["kind"], "kind") : "invariant";
    uint64_t within = prop["within"] ? unsigned_value(prop["within"], "within") : 0;
    if (!prop["predicate"]) {
      fail(prop, "property needs a predicate");
    }
    out.property = wrap_il(prop["predicate"], "property", [&] {
      try {
        return parse_property(m, kind, within, scalar(prop["predicate"], "predicate"));
      } catch (const ModelError & e) {
        fail(prop, e.what());
      }
    });
  }
  return out;
}

LoadedModel load_model(const std::filesystem::path & path)
{
  std::string text = read_file(path);
  try {
    return parse_model_yaml(text, path.parent_path());
  } catch (const ModelError & e) {
    throw ModelError(path.string() + ": " + e.what());
  }
}

}  // namespace pgv
