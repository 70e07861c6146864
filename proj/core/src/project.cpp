#include "pgv/project.hpp"

#include <cstdlib>

#include <yaml-cpp/yaml.h>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "yaml_util.hpp"

namespace pgv {

namespace fs = std::filesystem;
using namespace yaml_util;

namespace {

const char * kVersion = "0.1.0";

fs::path resolve(const fs::path & base, const std::string & p)
{
  fs::path q(p);
  return (q.is_absolute() ? q : base / q).lexically_normal();
}

double number(const YAML::Node & n, const std::string & what)
{
  std::string s = scalar(n, what);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || v <= 0) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception &) {
    fail(n, what + " must be a positive number, got '" + s + "'");
  }
}

bool boolean(const YAML::Node & n, const std::string & what)
{
  std::string s = scalar(n, what);
  if (s == "true") {
    return true;
  }
  if (s == "false") {
    return false;
  }
  fail(n, what + " must be true or false");
}

std::chrono::milliseconds millis(double s)
{
  return std::chrono::milliseconds(static_cast<int64_t>(s * 1000));
}

void read_tool(const YAML::Node & n, ToolConfig & t, const std::string & what)
{
  if (!n) {
    return;
  }
  check_keys(n, {"path", "args", "timeout_s"}, what);
  if (n["path"]) {
    t.path = scalar(n["path"], what + " path");
  }
  if (n["args"]) {
    t.args = string_list(n["args"], what + " args");
  }
  if (n["timeout_s"]) {
    t.timeout = millis(number(n["timeout_s"], what + " timeout_s"));
  }
}

// Anywhere in the document, so a misplaced key is still caught.
void reject_secrets(const YAML::Node & n)
{
  if (n.IsSequence()) {
    for (const auto & e : n) {
      reject_secrets(e);
    }
    return;
  }
  if (!n.IsMap()) {
    return;
  }
  for (const auto & kv : n) {
    std::string k = kv.first.as<std::string>();
    for (const char * s : {"api_key", "apikey", "key", "token", "secret", "password"}) {
      if (k == s) {
        fail(kv.first, "'" + k + "' is not allowed in project files; set PGV_LLM_API_KEY instead");
      }
    }
    reject_secrets(kv.second);
  }
}

std::string env_or(const char * name, const std::string & fallback)
{
  const char * v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

std::string to_string(SynthKind k)
{
  switch (k) {
    case SynthKind::Enum: return "enum";
    case SynthKind::Llm: return "llm";
    case SynthKind::Scripted: return "scripted";
  }
  return "?";
}

SynthKind parse_synth_kind(const std::string & s)
{
  if (s == "enum") {
    return SynthKind::Enum;
  }
  if (s == "llm") {
    return SynthKind::Llm;
  }
  if (s == "scripted") {
    return SynthKind::Scripted;
  }
  throw ModelError("unknown synthesis oracle '" + s + "' (expected enum, llm or scripted)");
}

Project load_project(const fs::path & path)
{
  std::string text = read_file(path);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception & e) {
    throw ModelError(path.string() + ": malformed YAML: " + e.what());
  }
  if (!root.IsMap()) {
    throw ModelError(path.string() + ": expected a map");
  }
  fs::path base = path.parent_path();
  Project p;

  if (!root["model"]) {
    // a bare model file
    p.model_file = path;
    p.model = load_model(path);
    if (!p.model.property) {
      throw ModelError(path.string() + ": the model has no property");
    }
    p.property = *p.model.property;
    return p;
  }

  p.file = path;
  try {
    reject_secrets(root);
    check_keys(root, {"model", "property", "bound", "budgets", "synthesis", "verification", "solver",
                      "output", "seed"},
               "project");
    p.model_file = resolve(base, scalar(root["model"], "model"));
    p.model = load_model(p.model_file);

    const YAML::Node & prop = root["property"];
    if (prop) {
      check_keys(prop, {"kind", "within", "predicate"}, "property");
      std::string kind = prop["kind"] ? scalar(prop["kind"], "kind") : "invariant";
      uint64_t within = prop["within"] ? unsigned_value(prop["within"], "within") : 0;
      if (!prop["predicate"]) {
        fail(prop, "property needs a predicate");
      }
      p.property = wrap_il(prop["predicate"], "property", [&] {
        try {
          return parse_property(p.model.model, kind, within, scalar(prop["predicate"], "predicate"));
        } catch (const ModelError & e) {
          fail(prop, e.what());
        }
      });
    } else if (p.model.property) {
      p.property = *p.model.property;
    } else {
      fail(root, "neither the project nor the model defines a property");
    }

    if (root["bound"]) {
      p.bound = unsigned_value(root["bound"], "bound");
    }
    if (const YAML::Node & b = root["budgets"]) {
      check_keys(b, {"max_cegis", "max_cegar"}, "budgets");
      if (b["max_cegis"]) {
        p.max_cegis = unsigned_value(b["max_cegis"], "max_cegis");
      }
      if (b["max_cegar"]) {
        p.max_cegar = unsigned_value(b["max_cegar"], "max_cegar");
      }
    }

    if (const YAML::Node & s = root["synthesis"]) {
      check_keys(s, {"oracle", "concurrent", "budget", "llm", "script"}, "synthesis");
      if (s["oracle"]) {
        try {
          p.synth = parse_synth_kind(scalar(s["oracle"], "oracle"));
        } catch (const ModelError & e) {
          fail(s["oracle"], e.what());
        }
      }
      if (s["concurrent"]) {
        p.concurrent_synthesis = boolean(s["concurrent"], "concurrent");
      }
      if (const YAML::Node & b = s["budget"]) {
        check_keys(b, {"max_candidates", "max_depth", "max_size", "wall_clock_s", "parallel_queries"},
                   "synthesis budget");
        SynthBudget & sb = p.synth_budget;
        if (b["max_candidates"]) {
          sb.max_candidates = unsigned_value(b["max_candidates"], "max_candidates");
        }
        if (b["max_depth"]) {
          sb.max_depth = unsigned_value(b["max_depth"], "max_depth");
        }
        if (b["max_size"]) {
          sb.max_size = unsigned_value(b["max_size"], "max_size");
        }
        if (b["wall_clock_s"]) {
          sb.wall_clock_s = number(b["wall_clock_s"], "wall_clock_s");
        }
        if (b["parallel_queries"]) {
          sb.parallel_queries = unsigned_value(b["parallel_queries"], "parallel_queries");
        }
      }
      if (const YAML::Node & l = s["llm"]) {
        check_keys(l, {"endpoint", "model", "transcript", "max_retries", "timeout_s"}, "llm");
        if (l["endpoint"]) {
          p.llm.endpoint = scalar(l["endpoint"], "endpoint");
        }
        if (l["model"]) {
          p.llm.model = scalar(l["model"], "model");
        }
        if (l["transcript"]) {
          p.llm.transcript = resolve(base, scalar(l["transcript"], "transcript")).string();
        }
        if (l["max_retries"]) {
          p.llm.max_retries = unsigned_value(l["max_retries"], "max_retries");
        }
        if (l["timeout_s"]) {
          p.llm.timeout = std::chrono::seconds(unsigned_value(l["timeout_s"], "timeout_s"));
        }
      }
      if (s["script"]) {
        p.script = resolve(base, scalar(s["script"], "script"));
      }
    }

    if (const YAML::Node & v = root["verification"]) {
      check_keys(v, {"unknown_policy", "mini", "cbmc", "kani"}, "verification");
      if (v["unknown_policy"]) {
        try {
          p.unknown_policy = parse_unknown_policy(scalar(v["unknown_policy"], "unknown_policy"));
        } catch (const PgvError & e) {
          fail(v["unknown_policy"], e.what());
        }
      }
      if (const YAML::Node & m = v["mini"]) {
        check_keys(m, {"max_bits"}, "mini");
        if (m["max_bits"]) {
          p.mini_max_bits = static_cast<unsigned>(unsigned_value(m["max_bits"], "max_bits"));
        }
      }
      read_tool(v["cbmc"], p.cbmc, "cbmc");
      read_tool(v["kani"], p.kani, "kani");
    }

    if (const YAML::Node & s = root["solver"]) {
      ToolConfig t{p.solver.path, p.solver.args, p.solver.timeout};
      read_tool(s, t, "solver");
      p.solver.path = t.path;
      p.solver.args = t.args;
      p.solver.timeout = t.timeout;
    }
    if (root["output"]) {
      p.output = resolve(base, scalar(root["output"], "output"));
    }
    if (root["seed"]) {
      p.seed = unsigned_value(root["seed"], "seed");
    }
  } catch (const ModelError & e) {
    std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) {
      throw;
    }
    throw ModelError(path.string() + ": " + msg);
  }
  if (p.synth == SynthKind::Scripted && p.script.empty()) {
    throw ModelError(path.string() + ": the scripted oracle needs synthesis.script");
  }
  return p;
}

std::vector<Contract> load_contract_script(const fs::path & path, const VarContext & ctx)
{
  YAML::Node root;
  try {
    root = YAML::Load(read_file(path));
  } catch (const YAML::Exception & e) {
    throw ModelError(path.string() + ": malformed YAML: " + e.what());
  }
  if (!root.IsMap() || !root["contracts"] || !root["contracts"].IsSequence()) {
    throw ModelError(path.string() + ": expected 'contracts: [...]'");
  }
  std::vector<Contract> out;
  for (const auto & c : root["contracts"]) {
    check_keys(c, {"procedure", "pre", "post"}, "scripted contract");
    std::string pre = c["pre"] ? scalar(c["pre"], "pre") : "true";
    std::string post = c["post"] ? scalar(c["post"], "post") : "true";
    out.push_back(wrap_il(c, "scripted contract", [&] { return parse_contract(pre, post, ctx); }));
  }
  return out;
}

Contract load_contract_file(const fs::path & path, const VarContext & ctx)
{
  YAML::Node root;
  try {
    root = YAML::Load(read_file(path));
  } catch (const YAML::Exception & e) {
    throw ModelError(path.string() + ": malformed YAML: " + e.what());
  }
  if (!root.IsMap()) {
    throw ModelError(path.string() + ": expected 'pre:' and 'post:'");
  }
  check_keys(root, {"procedure", "pre", "post"}, "contract");
  std::string pre = root["pre"] ? scalar(root["pre"], "pre") : "true";
  std::string post = root["post"] ? scalar(root["post"], "post") : "true";
  return wrap_il(root, "contract", [&] { return parse_contract(pre, post, ctx); });
}

std::string contract_yaml(const Contract & c)
{
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "pre" << YAML::Value << YAML::DoubleQuoted << pretty_print(c.pre);
  e << YAML::Key << "post" << YAML::Value << YAML::DoubleQuoted << pretty_print(c.post);
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

EngineConfig engine_config(const Project & p)
{
  EngineConfig cfg;
  const VarContext & ctx = *p.model.model.vars;
  switch (p.synth) {
    case SynthKind::Enum:
      cfg.synth = std::make_shared<EnumSynthesizer>();
      break;
    case SynthKind::Scripted:
      cfg.synth = std::make_shared<ScriptedSynthesizer>(load_contract_script(p.script, ctx));
      break;
    case SynthKind::Llm: {
      std::shared_ptr<ChatTransport> t;
      if (!p.llm.transcript.empty()) {
        t = TranscriptTransport::load(p.llm.transcript);
      } else {
        std::string endpoint = p.llm.endpoint.empty() ? env_or("PGV_LLM_ENDPOINT", "") : p.llm.endpoint;
        std::string model = p.llm.model.empty() ? env_or("PGV_LLM_MODEL", "") : p.llm.model;
        if (endpoint.empty() || model.empty()) {
          throw TransportError("the LLM oracle needs an endpoint and a model (project or PGV_LLM_ENDPOINT / "
                               "PGV_LLM_MODEL)");
        }
        t = std::make_shared<HttpChatTransport>(endpoint, model, env_or("PGV_LLM_API_KEY", ""),
                                                p.llm.timeout);
      }
      cfg.synth = std::make_shared<LlmSynthesizer>(t, p.llm.max_retries);
      break;
    }
  }
  auto lv = std::make_shared<LanguageVerifier>();
  lv->set(Language::Mini, std::make_shared<MiniVerifier>(p.mini_max_bits));
  lv->set(Language::C, std::make_shared<CbmcVerifier>(p.cbmc));
  lv->set(Language::Rust, std::make_shared<KaniVerifier>(p.kani));
  cfg.verifier = lv;
  cfg.synth_budget = p.synth_budget;
  cfg.bound = p.bound;
  cfg.max_cegis = p.max_cegis;
  cfg.max_cegar = p.max_cegar;
  cfg.unknown_policy = p.unknown_policy;
  cfg.concurrent_synthesis = p.concurrent_synthesis && p.synth != SynthKind::Scripted;
  cfg.solver = p.solver;
  return cfg;
}

RunMetadata project_metadata(const Project & p)
{
  RunMetadata m;
  auto join = [](const std::vector<std::string> & v) {
    std::string s;
    for (const auto & x : v) {
      s += (s.empty() ? "" : " ") + x;
    }
    return s;
  };
  m["pgv_version"] = kVersion;
  m["model_file"] = p.model_file.filename().string();
  m["bound"] = std::to_string(p.bound);
  m["max_cegis"] = std::to_string(p.max_cegis);
  m["max_cegar"] = std::to_string(p.max_cegar);
  m["synthesis_oracle"] = to_string(p.synth);
  m["unknown_policy"] = to_string(p.unknown_policy);
  m["seed"] = std::to_string(p.seed);
  m["solver"] = p.solver.path + (p.solver.args.empty() ? "" : " " + join(p.solver.args));
  bool c = false, rust = false;
  for (const auto & [name, f] : p.model.model.procedures) {
    c = c || f.language == Language::C;
    rust = rust || f.language == Language::Rust;
  }
  if (c) {
    m["cbmc"] = p.cbmc.path + (p.cbmc.args.empty() ? "" : " " + join(p.cbmc.args));
  }
  if (rust) {
    m["kani"] = p.kani.path + (p.kani.args.empty() ? "" : " " + join(p.kani.args));
  }
  if (p.synth == SynthKind::Llm) {
    m["llm_model"] = p.llm.transcript.empty() ? (p.llm.model.empty() ? env_or("PGV_LLM_MODEL", "") : p.llm.model)
                                              : "transcript:" + fs::path(p.llm.transcript).filename().string();
  }
  return m;
}

}  // namespace pgv
