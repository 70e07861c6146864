#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "pgv/engine.hpp"
#include "pgv/model_io.hpp"
#include "pgv/report.hpp"

namespace pgv {

// Project files (YAML) tie a model to a property and an oracle setup.
// Schema in docs/project_format.md. LLM keys never appear in project files;
// they are read from PGV_LLM_API_KEY.

enum class SynthKind
{
  Enum,
  Llm,
  Scripted
};

std::string to_string(SynthKind k);
SynthKind parse_synth_kind(const std::string & s);

struct LlmSettings
{
  std::string endpoint;    // falls back to PGV_LLM_ENDPOINT
  std::string model;       // falls back to PGV_LLM_MODEL
  std::string transcript;  // replay file instead of HTTP
  std::size_t max_retries = 3;
  std::chrono::seconds timeout{120};
};

struct Project
{
  std::filesystem::path file;        // empty when built from a model file
  std::filesystem::path model_file;
  LoadedModel model;
  Property property;

  std::size_t bound = 12;
  std::size_t max_cegis = 20;
  std::size_t max_cegar = 50;
  SynthBudget synth_budget;
  SynthKind synth = SynthKind::Enum;
  bool concurrent_synthesis = false;
  LlmSettings llm;
  std::filesystem::path script;  // scripted synthesis replies
  UnknownPolicy unknown_policy = UnknownPolicy::Abort;
  unsigned mini_max_bits = 22;
  ToolConfig cbmc{"cbmc", {}, std::chrono::seconds(300)};
  ToolConfig kani{"kani", {}, std::chrono::seconds(300)};
  SolverConfig solver;
  std::filesystem::path output = "pgv-out";
  uint64_t seed = 0;
};

/// Reads a project file, or a bare model file (which then needs its own
/// property). Relative paths resolve against the file's directory. Throws
/// ModelError on schema problems and missing files.
Project load_project(const std::filesystem::path & path);

/// Scripted synthesis replies: `contracts: [{procedure, pre, post}, ...]`.
std::vector<Contract> load_contract_script(const std::filesystem::path & path,
                                           const VarContext & ctx);

/// A single contract file: `pre: ...` and `post: ...`.
Contract load_contract_file(const std::filesystem::path & path, const VarContext & ctx);
std::string contract_yaml(const Contract & c);

/// Oracles and budgets for the project. Verifiers: mini always, CBMC for C
/// and Kani for Rust procedures.
EngineConfig engine_config(const Project & p);

/// Configuration part of a run report.
RunMetadata project_metadata(const Project & p);

}  // namespace pgv
