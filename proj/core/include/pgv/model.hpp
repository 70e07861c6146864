#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pgv/codegen.hpp"
#include "pgv/expr.hpp"
#include "pgv/minilang.hpp"
#include "pgv/types.hpp"

namespace pgv {

enum class Language
{
  Mini,
  C,
  Rust
};

std::string to_string(Language l);
Language parse_language(const std::string & s);

/// How a C/Rust procedure sees one model variable.
struct InterfaceVar
{
  std::string var;
  NameBinding binding;      // empty target: same name, direct
  std::string target_type;  // struct type for ports/records
  VarRole role = VarRole::State;
};

struct ProcedureRef
{
  std::string name;
  Language language = Language::Mini;
  std::string source;
  std::string entry;     // C/Rust function; defaults to `name`
  std::string preamble;  // includes / type definitions for harnesses
  std::string call;      // custom call statement for harnesses
  std::vector<InterfaceVar> interface;
  std::set<std::string> reads;
  std::set<std::string> writes;
  std::shared_ptr<const MiniProc> mini;  // Language::Mini only

  /// Variables the procedure may touch; its contract ranges over these.
  std::set<std::string> vars() const;
};

struct Transition
{
  std::string id;
  std::string from;
  std::string to;
  Expr guard = Expr::bool_lit(true);
  std::vector<std::string> update;
  uint64_t duration = 0;
};

struct InitSpec
{
  std::string mode;
  Expr predicate = Expr::bool_lit(true);
};

/// Modes, typed variables, initial condition, guarded transitions whose
/// updates are procedure sequences.
struct PolyglotModel
{
  std::string name;
  std::vector<std::string> modes;
  std::set<std::string> terminal;
  ContextPtr vars;
  InitSpec init;
  std::vector<Transition> transitions;
  std::map<std::string, ProcedureRef> procedures;

  const ProcedureRef & procedure(const std::string & name) const;
  int mode_index(const std::string & mode) const;
  /// vars plus the reserved record `mode` with one Bool field per mode.
  ContextPtr property_context() const;
  /// Names of procedures in order of first use by a transition.
  std::vector<std::string> procedure_order() const;
};

enum class PropertyKind
{
  Invariant,
  EventuallyWithin
};

struct Property
{
  PropertyKind kind = PropertyKind::Invariant;
  uint64_t within = 0;  // EventuallyWithin bound in time units
  Expr predicate = Expr::bool_lit(true);  // over property_context(), pre position

  std::string str() const;
};

Property parse_property(const PolyglotModel & m, const std::string & kind,
                        uint64_t within, const std::string & predicate);

struct ProcCall
{
  std::string procedure;
  Assignment pre;
  Assignment post;
};

struct TraceStep
{
  std::string mode;
  Assignment state;
  std::string transition;  // empty for the initial step
  std::vector<ProcCall> calls;
  uint64_t time = 0;       // cumulative
};

struct Trace
{
  std::vector<TraceStep> steps;
  bool stuck = false;    // ended in a non-terminal mode with nothing enabled
  bool maximal = false;  // cannot be extended (stuck or terminal)
};

struct Diagnostic
{
  std::string code;  // UnknownProcedure, OldInGuard, ...
  std::string message;
};

std::vector<Diagnostic> validate_model(const PolyglotModel & m);

/// Resolves nondeterminism during simulation.
class Scheduler
{
 public:
  virtual ~Scheduler() = default;
  /// Index among `n` enabled transitions.
  virtual std::size_t choose_transition(std::size_t n) = 0;
  /// Index among `n` havoc values (n == 0 means 2^64).
  virtual uint64_t choose_value(uint64_t n) = 0;
  /// Offset into the scan for an initial state among `n` candidates.
  virtual uint64_t choose_init(uint64_t n) = 0;
};

class SeededScheduler : public Scheduler
{
 public:
  explicit SeededScheduler(uint64_t seed) : rng_(seed) {}
  std::size_t choose_transition(std::size_t n) override;
  uint64_t choose_value(uint64_t n) override;
  uint64_t choose_init(uint64_t n) override;

 private:
  std::mt19937_64 rng_;
};

/// Replays fixed choices; once exhausted every choice is 0.
class ScriptedScheduler : public Scheduler
{
 public:
  ScriptedScheduler(std::vector<std::size_t> transitions,
                    std::vector<uint64_t> values)
      : transitions_(std::move(transitions)), values_(std::move(values))
  {
  }
  std::size_t choose_transition(std::size_t n) override;
  uint64_t choose_value(uint64_t n) override;
  uint64_t choose_init(uint64_t) override { return 0; }

 private:
  std::vector<std::size_t> transitions_;
  std::vector<uint64_t> values_;
  std::size_t ti_ = 0, vi_ = 0;
};

/// Executes up to `steps` transitions. All procedures must be mini.
Trace simulate(const PolyglotModel & m, std::size_t steps, Scheduler & sched);

/// Assignment over property_context() for a mode and a variable state.
Assignment property_state(const PolyglotModel & m, const std::string & mode,
                          const Assignment & state);
Assignment property_state(const PolyglotModel & m, const ContextPtr & pc,
                          const std::string & mode, const Assignment & state);

enum class Truth
{
  True,
  False,
  Inconclusive
};

std::string to_string(Truth t);

Truth holds(const PolyglotModel & m, const Property & p, const Trace & t);

/// Checks that consecutive steps follow declared transitions, time is
/// nondecreasing and per-procedure pairs chain. Returns problems found.
std::vector<std::string> check_trace(const PolyglotModel & m, const Trace & t);

std::string render_trace(const PolyglotModel & m, const Trace & t);

}  // namespace pgv
