// pgv: command-line front end.
//
// Exit codes: 0 pass / success, 1 property violated, 2 inconclusive,
// 3 usage or configuration error, 4 tool or runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pgv/codegen.hpp"
#include "pgv/engine.hpp"
#include "pgv/error.hpp"
#include "pgv/model.hpp"
#include "pgv/oracles.hpp"
#include "pgv/project.hpp"
#include "pgv/report.hpp"
#include "pgv/smt.hpp"

namespace fs = std::filesystem;
using namespace pgv;

namespace {

enum Exit
{
  kPass = 0,
  kFail = 1,
  kInconclusive = 2,
  kUsage = 3,
  kRuntime = 4
};

class UsageError : public PgvError
{
 public:
  using PgvError::PgvError;
};

struct Overrides
{
  std::optional<std::size_t> bound, max_cegis, max_cegar;
  std::optional<std::string> synth_oracle, solver, cbmc, kani, out;
  std::optional<uint64_t> seed;
  std::optional<double> timeout;
};

void add_common(CLI::App * cmd, Overrides & o)
{
  cmd->add_option("--bound", o.bound, "BMC bound in transitions")->check(CLI::PositiveNumber);
  cmd->add_option("--max-cegis", o.max_cegis, "synthesis rounds per procedure")->check(CLI::PositiveNumber);
  cmd->add_option("--max-cegar", o.max_cegar, "abstraction refinements")->check(CLI::PositiveNumber);
  cmd->add_option("--synth-oracle", o.synth_oracle, "enum | llm | scripted")
      ->check(CLI::IsMember({"enum", "llm", "scripted"}));
  cmd->add_option("--solver", o.solver, "SMT-LIB solver executable");
  cmd->add_option("--cbmc", o.cbmc, "CBMC executable");
  cmd->add_option("--kani", o.kani, "Kani executable");
  cmd->add_option("--seed", o.seed, "seed for simulation and metadata");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--timeout", o.timeout, "per-call timeout of external tools and the solver, seconds")
      ->check(CLI::PositiveNumber);
}

Project open_project(const std::string & path, const Overrides & o)
{
  if (!fs::exists(path)) {
    throw UsageError("no such file: " + path);
  }
  Project p = load_project(path);
  if (o.bound) {
    p.bound = *o.bound;
  }
  if (o.max_cegis) {
    p.max_cegis = *o.max_cegis;
  }
  if (o.max_cegar) {
    p.max_cegar = *o.max_cegar;
  }
  if (o.synth_oracle) {
    p.synth = parse_synth_kind(*o.synth_oracle);
    if (p.synth == SynthKind::Scripted && p.script.empty()) {
      throw UsageError("--synth-oracle scripted needs synthesis.script in the project");
    }
  }
  if (o.solver) {
    p.solver.path = *o.solver;
  }
  if (o.cbmc) {
    p.cbmc.path = *o.cbmc;
  }
  if (o.kani) {
    p.kani.path = *o.kani;
  }
  if (o.out) {
    p.output = *o.out;
  }
  if (o.seed) {
    p.seed = *o.seed;
  }
  if (o.timeout) {
    auto ms = std::chrono::milliseconds(static_cast<int64_t>(*o.timeout * 1000));
    p.solver.timeout = ms;
    p.cbmc.timeout = ms;
    p.kani.timeout = ms;
  }
  return p;
}

void write_file(const fs::path & path, const std::string & text)
{
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw PgvError("cannot write " + path.string());
  }
  out << text;
}

const ProcedureRef & find_procedure(const Project & p, const std::string & name)
{
  auto it = p.model.model.procedures.find(name);
  if (it == p.model.model.procedures.end()) {
    std::string known;
    for (const auto & [n, f] : p.model.model.procedures) {
      known += (known.empty() ? "" : ", ") + n;
    }
    throw UsageError("no procedure '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

int cmd_verify(const Project & p)
{
  const PolyglotModel & m = p.model.model;
  EngineConfig cfg = engine_config(p);
  RunMetadata meta = project_metadata(p);
  try {
    SmtSession s(p.solver);
    meta["solver_identity"] = s.identity();
  } catch (const SolverError & e) {
    throw PgvError(std::string("solver unavailable: ") + e.what());
  }
  EngineResult r = polyver(m, p.property, cfg);
  std::string text = report_text(m, p.property, r, meta);
  write_file(p.output / "report.json", report_json(m, p.property, r, meta));
  write_file(p.output / "report.txt", text);
  std::cout << text << "\nreport written to " << p.output.string() << "\n";
  switch (r.outcome) {
    case Outcome::Pass: return kPass;
    case Outcome::Fail: return kFail;
    case Outcome::Inconclusive: return kInconclusive;
  }
  return kRuntime;
}

int cmd_synth(const Project & p, const std::string & name, bool write)
{
  const ProcedureRef & f = find_procedure(p, name);
  EngineConfig cfg = engine_config(p);
  ExampleSets x;
  SynthOutcome r;
  try {
    r = synth_contract(f, p.model.model.vars, x, cfg);
  } catch (const OracleError & e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const OracleStagnation & e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  }
  if (!r.contract) {
    std::cerr << "inconclusive: " << r.reason << "\n";
    return kInconclusive;
  }
  std::string text = "procedure: " + name + "\n" + contract_yaml(*r.contract);
  std::cout << text;
  std::cerr << r.iterations << " iteration(s), " << x.positive.size() << " counterexample(s)\n";
  if (write) {
    fs::path out = p.output / (name + ".contract.yaml");
    write_file(out, text);
    std::cerr << "written to " << out.string() << "\n";
  }
  return kPass;
}

int cmd_emit_harness(const Project & p, const std::string & name, const std::string & contract_file)
{
  const ProcedureRef & f = find_procedure(p, name);
  if (f.language == Language::Mini) {
    throw UsageError("'" + name + "' is a mini procedure; harnesses exist only for c and rust");
  }
  if (!fs::exists(contract_file)) {
    throw UsageError("no such file: " + contract_file);
  }
  Contract c = load_contract_file(contract_file, *p.model.model.vars);
  HarnessSpec h = harness_for(f, p.model.model.vars, c);
  bool is_c = f.language == Language::C;
  std::string text = is_c ? emit_cbmc_harness(h) : emit_kani_harness(h);
  fs::path out = p.output / (h.entry + (is_c ? "_harness.c" : "_harness.rs"));
  write_file(out, text);
  std::cout << out.string() << "\n";
  return kPass;
}

int cmd_simulate(const Project & p, std::size_t steps, bool json)
{
  const PolyglotModel & m = p.model.model;
  for (const auto & [name, f] : m.procedures) {
    if (f.language != Language::Mini) {
      throw UsageError("simulation needs mini procedures; '" + name + "' is " + to_string(f.language));
    }
  }
  SeededScheduler sched(p.seed);
  Trace t = simulate(m, steps, sched);
  if (json) {
    std::cout << trace_json(t);
  } else {
    std::cout << render_trace(m, t);
    std::cout << "property " << p.property.str() << ": " << to_string(holds(m, p.property, t)) << "\n";
  }
  return kPass;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Compositional verifier for polyglot state machines"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pgv 0.1.0");

  Overrides ov;
  std::string project, procedure, contract_file;
  std::size_t steps = 20;
  bool json = false, write = false;

  auto * verify = app.add_subcommand("verify", "synthesize contracts and check the property");
  verify->add_option("project", project, "project or model file")->required();
  add_common(verify, ov);

  auto * synth = app.add_subcommand("synth", "synthesize one procedure's contract");
  synth->add_option("project", project, "project or model file")->required();
  synth->add_option("procedure", procedure, "procedure name")->required();
  synth->add_flag("--write", write, "also write <out>/<procedure>.contract.yaml");
  add_common(synth, ov);

  auto * emit = app.add_subcommand("emit-harness", "write the CBMC or Kani harness for a contract");
  emit->add_option("project", project, "project or model file")->required();
  emit->add_option("procedure", procedure, "procedure name")->required();
  emit->add_option("contract", contract_file, "contract file (pre:/post:)")->required();
  add_common(emit, ov);

  auto * sim = app.add_subcommand("simulate", "run the concrete model");
  sim->add_option("project", project, "project or model file")->required();
  sim->add_option("--steps", steps, "transitions to take");
  sim->add_flag("--json", json, "print the trace as JSON");
  add_common(sim, ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kUsage;
  }

  try {
    Project p = open_project(project, ov);
    if (verify->parsed()) {
      return cmd_verify(p);
    }
    if (synth->parsed()) {
      return cmd_synth(p, procedure, write);
    }
    if (emit->parsed()) {
      return cmd_emit_harness(p, procedure, contract_file);
    }
    return cmd_simulate(p, steps, json);
  } catch (const UsageError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IlError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
