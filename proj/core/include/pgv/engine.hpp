#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pgv/checker.hpp"
#include "pgv/model.hpp"
#include "pgv/oracles.hpp"
#include "pgv/smt.hpp"

namespace pgv {

enum class UnknownPolicy
{
  Abort,          // an Unknown verifier answer ends the run as Inconclusive
  TreatAsFail     // during synthesis: reject the candidate without an example
};

std::string to_string(UnknownPolicy p);
UnknownPolicy parse_unknown_policy(const std::string & s);

struct EngineConfig
{
  std::shared_ptr<SynthesisOracle> synth;
  std::shared_ptr<VerificationOracle> verifier;  // usually a LanguageVerifier
  SynthBudget synth_budget;
  std::size_t bound = 12;      // BMC steps
  std::size_t max_cegis = 20;  // synthesize/verify rounds per procedure and CEGAR iteration
  std::size_t max_cegar = 50;
  UnknownPolicy unknown_policy = UnknownPolicy::Abort;
  /// Synthesize procedures of one sweep concurrently. The oracles must then
  /// be safe to call from several threads (scripted oracles are not).
  bool concurrent_synthesis = false;
  SolverConfig solver;

  /// Throws PgvError on missing oracles or zero budgets.
  void validate() const;
};

/// Positive and negative examples of one procedure.
struct ExampleSets
{
  std::vector<ExamplePair> positive;
  std::vector<ExamplePair> negative;
};

struct SynthOutcome
{
  std::optional<Contract> contract;  // empty: Inconclusive
  std::string reason;
  std::size_t iterations = 0;
  double synth_s = 0;
  double verif_s = 0;
};

/// Synthesize/verify loop for one procedure. Counterexamples are appended to
/// `x.positive`; a repeated one throws OracleStagnation. Candidates that are
/// ill-typed or disagree with the examples count as iterations.
SynthOutcome synth_contract(const ProcedureRef & f, const ContextPtr & ctx, ExampleSets & x,
                            const EngineConfig & cfg);

struct SpuriousOutcome
{
  std::vector<ExamplePair> negative;  // pairs f cannot produce
  std::optional<std::string> unknown; // set when the oracle could not decide
  double verif_s = 0;
};

/// Checks every call of `f` in `t` for impossibility.
SpuriousOutcome check_spurious(const Trace & t, const ProcedureRef & f, const EngineConfig & cfg);

enum class Outcome
{
  Pass,
  Fail,
  Inconclusive
};

std::string to_string(Outcome o);

struct EngineStats
{
  std::map<std::string, std::size_t> cegis;  // synthesis rounds per procedure
  std::size_t cegar = 0;
  double synth_s = 0;  // synthesis oracle
  double verif_s = 0;  // contract checks and spuriousness checks
  double mc_s = 0;     // abstraction and model checking
  double total_s = 0;

  std::size_t cegis_total() const;
};

struct EngineResult
{
  Outcome outcome = Outcome::Inconclusive;
  std::size_t bound = 0;  // Pass
  Trace trace;            // Fail
  std::string reason;     // Inconclusive
  ContractTable contracts;
  std::map<std::string, ExampleSets> examples;
  std::vector<std::string> warnings;
  EngineStats stats;
};

/// The CEGIS/CEGAR loop. Example sets persist across iterations; only
/// procedures that gained negative examples are synthesized again. Oracle,
/// solver and composition errors end the run as Inconclusive.
EngineResult polyver(const PolyglotModel & m, const Property & p, const EngineConfig & cfg);

}  // namespace pgv
