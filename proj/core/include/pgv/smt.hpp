#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pgv/subprocess.hpp"
#include "pgv/types.hpp"

namespace pgv {

struct SolverConfig
{
  std::string path = "z3";
  std::vector<std::string> args = {"-in", "-smt2"};
  std::chrono::milliseconds timeout = std::chrono::seconds(60);
};

/// Parsed S-expression: an atom (`atom` set, `list` empty) or a list.
struct Sexp
{
  std::string atom;
  std::vector<Sexp> list;
  bool is_atom = true;

  static Sexp parse(std::string_view text);
  std::string str() const;
};

/// Raw bits of an SMT-LIB value: `true`, `#b0101`, `#x0f`, `(_ bv5 8)`.
uint64_t parse_smt_bits(const Sexp & v);

enum class SatResult
{
  Sat,
  Unsat,
  Unknown
};

/// An incremental SMT-LIB v2 dialogue with an external solver process.
/// Not thread-safe; use one session per thread.
class SmtSession
{
 public:
  explicit SmtSession(const SolverConfig & cfg = {});

  /// Sends a command that answers `success`; throws SolverError otherwise.
  void command(const std::string & cmd);
  void declare(const std::string & symbol, const std::string & sort);
  void assert_term(const std::string & term);
  void push() { command("(push 1)"); }
  void pop() { command("(pop 1)"); }
  SatResult check_sat();
  /// Values of `terms` in the last model, in order.
  std::vector<Sexp> get_values(const std::vector<std::string> & terms);
  /// Bits of scalar-typed terms.
  std::vector<uint64_t> get_bits(const std::vector<std::string> & terms);

  /// Solver name and version from `(get-info ...)`.
  std::string identity();

  /// Commands sent so far (for debugging and reports).
  const std::string & log() const { return log_; }

 private:
  Sexp read();

  SolverConfig cfg_;
  std::unique_ptr<Pipe> pipe_;
  std::string log_;
};

}  // namespace pgv
