#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgv/expr.hpp"
#include "pgv/model.hpp"
#include "pgv/oracles.hpp"
#include "pgv/smt.hpp"

namespace pgv {

using ContractTable = std::map<std::string, Contract>;

struct CompositionResult
{
  bool ok = true;
  std::size_t junction = 0;  // failing j: Q_j does not imply P_{j+1}
  std::optional<Assignment> witness;
};

/// For each adjacent pair in `chain`, checks that Q_j (any pre-state) implies
/// P_{j+1} on its post-state, as SMT validity over `ctx`.
CompositionResult check_composition(const std::vector<Contract> & chain, const ContextPtr & ctx,
                                    const SolverConfig & solver);

/// A model whose procedure calls are replaced by contract relations: call j
/// relates d to d' iff P_j(d) implies Q_j(d, d'), and variables outside the
/// procedure's footprint keep their values. Chains compose through
/// intermediate states.
struct AbstractModel
{
  PolyglotModel model;
  ContractTable contracts;

  /// Whether call `procedure` may map d to d'.
  bool call_admits(const std::string & procedure, const Assignment & d,
                   const Assignment & d2) const;
};

/// Type-checks the contracts, checks composition along every transition and
/// builds the abstract model. Throws CompositionFailure.
AbstractModel induce(const PolyglotModel & m, const ContractTable & contracts,
                     const SolverConfig & solver);

/// Whether some chain of intermediate states takes `from` to `to` through
/// transition `t` of the abstract model (guard included).
bool admits_step(const AbstractModel & a, const Transition & t, const Assignment & from,
                 const Assignment & to, const SolverConfig & solver);

enum class McVerdict
{
  Pass,
  Fail,
  Unknown
};

struct McResult
{
  McVerdict verdict = McVerdict::Pass;
  std::size_t bound = 0;  // Pass: no violation within this many steps
  Trace trace;            // Fail
  std::string reason;     // Unknown
  std::vector<std::string> warnings;
};

/// Bounded model checking of the abstract model over an SMT unrolling of
/// `bound` transitions.
///
/// Invariant: the shortest path to a violating state.
/// EventuallyWithin(T): a path with the predicate false up to its last step
/// whose last step is past T, or which ends in a maximal state without a
/// witness. Among those, the one whose last step is latest is returned
/// (earliest depth on ties). Paths still below T at the bound are reported
/// as a warning on Pass.
McResult bmc(const AbstractModel & a, const Property & p, std::size_t bound,
             const SolverConfig & solver);

/// Per-procedure (pre, post) pairs of a trace, in order, without repeats.
std::map<std::string, std::vector<ExamplePair>> extract(const Trace & t);

}  // namespace pgv
