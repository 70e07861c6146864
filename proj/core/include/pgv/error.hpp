#pragma once

#include <stdexcept>
#include <string>

namespace pgv {

/// Base of every exception thrown by the library.
class PgvError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Contract language errors

class IlError : public PgvError
{
 public:
  using PgvError::PgvError;
};

/// Malformed text. `offset` is a byte offset into the parsed string.
class SyntaxError : public IlError
{
 public:
  SyntaxError(const std::string & msg, std::size_t offset)
      : IlError("syntax error at offset " + std::to_string(offset) + ": " + msg),
        offset_(offset)
  {
  }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class TypeError : public IlError
{
 public:
  TypeError(std::string subterm, std::string expected, std::string found)
      : IlError("type error in '" + subterm + "': expected " + expected
                + ", found " + found),
        subterm_(std::move(subterm)),
        expected_(std::move(expected)),
        found_(std::move(found))
  {
  }
  const std::string & subterm() const { return subterm_; }
  const std::string & expected() const { return expected_; }
  const std::string & found() const { return found_; }

 private:
  std::string subterm_, expected_, found_;
};

class UnknownVariable : public IlError
{
 public:
  explicit UnknownVariable(std::string name)
      : IlError("unknown variable '" + name + "'"), name_(std::move(name))
  {
  }
  const std::string & name() const { return name_; }

 private:
  std::string name_;
};

class OldInPrecondition : public IlError
{
 public:
  OldInPrecondition() : IlError("old(...) is not allowed in pre-state position")
  {
  }
};

class MissingPostState : public IlError
{
 public:
  MissingPostState()
      : IlError("expression refers to old(...) but no post-state was supplied")
  {
  }
};

// ---------------------------------------------------------------------------
// Code generation

class CodegenError : public PgvError
{
 public:
  using PgvError::PgvError;
};

class UnmappedVariable : public CodegenError
{
 public:
  explicit UnmappedVariable(const std::string & name)
      : CodegenError("variable '" + name + "' has no entry in the name map")
  {
  }
};

class ContractVariableUnmapped : public CodegenError
{
 public:
  explicit ContractVariableUnmapped(const std::string & name)
      : CodegenError("contract variable '" + name
                     + "' is not declared by the harness")
  {
  }
};

// ---------------------------------------------------------------------------
// Mini procedures

class RangeTooLarge : public PgvError
{
 public:
  using PgvError::PgvError;
};

class DomainTooLarge : public PgvError
{
 public:
  using PgvError::PgvError;
};

// ---------------------------------------------------------------------------
// Oracles, solver, engine

class OracleError : public PgvError
{
 public:
  using PgvError::PgvError;
};

class NoCandidate : public OracleError
{
 public:
  using OracleError::OracleError;
};

class TransportError : public OracleError
{
 public:
  using OracleError::OracleError;
};

class ScriptExhausted : public OracleError
{
 public:
  using OracleError::OracleError;
};

class SolverError : public PgvError
{
 public:
  using PgvError::PgvError;
};

class SolverTimeout : public SolverError
{
 public:
  using SolverError::SolverError;
};

class CompositionFailure : public PgvError
{
 public:
  using PgvError::PgvError;
};

class OracleStagnation : public PgvError
{
 public:
  using PgvError::PgvError;
};

class ModelError : public PgvError
{
 public:
  using PgvError::PgvError;
};

}  // namespace pgv
