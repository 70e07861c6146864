#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pgv/codegen.hpp"
#include "pgv/expr.hpp"
#include "pgv/model.hpp"
#include "pgv/subprocess.hpp"
#include "pgv/types.hpp"

namespace pgv {

enum class Polarity
{
  Positive,
  Negative
};

/// A (pre, post) pair over the model context.
struct ExamplePair
{
  Assignment pre;
  Assignment post;
  Polarity polarity = Polarity::Positive;

  std::string str() const;
  friend bool operator==(const ExamplePair & a, const ExamplePair & b)
  {
    return a.pre == b.pre && a.post == b.post && a.polarity == b.polarity;
  }
};

enum class Verdict
{
  Pass,
  Fail,
  Unknown
};

enum class UnknownReason
{
  None,
  Timeout,
  ToolError,
  Unsupported
};

std::string to_string(Verdict v);
std::string to_string(UnknownReason r);

struct VerifResult
{
  Verdict verdict = Verdict::Pass;
  std::optional<ExamplePair> example;  // Fail only
  UnknownReason reason = UnknownReason::None;
  std::string detail;

  static VerifResult pass() { return {}; }
  static VerifResult fail(ExamplePair x)
  {
    VerifResult r;
    r.verdict = Verdict::Fail;
    r.example = std::move(x);
    return r;
  }
  static VerifResult unknown(UnknownReason why, std::string detail)
  {
    VerifResult r;
    r.verdict = Verdict::Unknown;
    r.reason = why;
    r.detail = std::move(detail);
    return r;
  }
  std::string str() const;
};

struct SynthBudget
{
  std::size_t max_candidates = 200000;  // enumerated terms / LLM replies
  std::size_t max_depth = 5;            // expression depth of one atom
  std::size_t max_size = 9;             // AST nodes of one atom
  double wall_clock_s = 30;
  std::size_t parallel_queries = 3;     // LLM only
};

/// Everything a synthesizer sees about one procedure.
struct SynthTask
{
  const ProcedureRef * procedure = nullptr;
  ContextPtr ctx;  // model variables; contracts range over procedure->vars()
  std::vector<ExamplePair> positive;
  std::vector<ExamplePair> negative;
  /// Why the previous candidate was rejected (LLM prompt stage two).
  std::string feedback;
};

/// True iff (P, Q) satisfies the example constraint: every positive pair
/// with P(pre) has Q(pre, post); every negative pair has P(pre) and not
/// Q(pre, post).
bool satisfies_examples(const Contract & c, const std::vector<ExamplePair> & pos,
                        const std::vector<ExamplePair> & neg);

// ---------------------------------------------------------------------------
// Oracle interfaces

class VerificationOracle
{
 public:
  virtual ~VerificationOracle() = default;
  virtual std::string name() const = 0;
  /// Pass iff {P} f {Q}. Fail carries a positive example.
  virtual VerifResult verify(const Contract & c, const ProcedureRef & f,
                             const ContextPtr & ctx) = 0;
  /// Pass iff f cannot map pair.pre to pair.post.
  virtual VerifResult verify_pair_impossible(const ProcedureRef & f,
                                             const ExamplePair & pair) = 0;
};

class SynthesisOracle
{
 public:
  virtual ~SynthesisOracle() = default;
  virtual std::string name() const = 0;
  /// Throws NoCandidate when the budget runs out.
  virtual Contract synthesize(const SynthTask & task, const SynthBudget & b) = 0;
};

// ---------------------------------------------------------------------------
// Mini-language verifier

/// Exact verification by enumeration (brute_verify); Unknown(unsupported)
/// when the domain exceeds `max_bits`.
class MiniVerifier : public VerificationOracle
{
 public:
  explicit MiniVerifier(unsigned max_bits = 22) : max_bits_(max_bits) {}
  std::string name() const override { return "mini"; }
  VerifResult verify(const Contract & c, const ProcedureRef & f,
                     const ContextPtr & ctx) override;
  VerifResult verify_pair_impossible(const ProcedureRef & f,
                                     const ExamplePair & pair) override;

 private:
  unsigned max_bits_;
};

// ---------------------------------------------------------------------------
// Enumerative synthesizer

/// Bottom-up enumeration with observational equivalence over the example
/// points. P = true is tried first; Q is the smallest single atom separating
/// the examples, else a greedy cover of the negatives by atoms true on every
/// relevant positive. Further preconditions are single pre-state atoms in
/// size order. Deterministic.
class EnumSynthesizer : public SynthesisOracle
{
 public:
  std::string name() const override { return "enum"; }
  Contract synthesize(const SynthTask & task, const SynthBudget & b) override;
};

/// Integer literals harvested from procedure text (decimal and hex).
std::vector<uint64_t> mine_constants(const std::string & text);

// ---------------------------------------------------------------------------
// LLM synthesizer

struct ChatMessage
{
  std::string role;  // system | user | assistant
  std::string content;
};

/// Sends one chat-completion request and returns the reply text.
class ChatTransport
{
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const std::vector<ChatMessage> & messages) = 0;
  /// Whether complete() may be called from several threads at once.
  virtual bool concurrent() const { return false; }
};

/// OpenAI-style `/chat/completions` over HTTP(S). Endpoint, model and key
/// come from PGV_LLM_ENDPOINT, PGV_LLM_MODEL and PGV_LLM_API_KEY.
class HttpChatTransport : public ChatTransport
{
 public:
  HttpChatTransport(std::string endpoint, std::string model, std::string api_key,
                    std::chrono::seconds timeout = std::chrono::seconds(120));
  /// Reads the environment; throws TransportError when it is incomplete.
  static std::unique_ptr<HttpChatTransport> from_env();
  std::string complete(const std::vector<ChatMessage> & messages) override;
  bool concurrent() const override { return true; }

 private:
  std::string endpoint_, model_, key_;
  std::chrono::seconds timeout_;
};

/// Replays replies recorded in a JSON transcript:
/// {"records": [{"request": [...messages...], "reply": "..."}]}.
/// Requests are not matched, only counted; exhaustion is a TransportError.
class TranscriptTransport : public ChatTransport
{
 public:
  explicit TranscriptTransport(std::vector<std::string> replies)
      : replies_(replies.begin(), replies.end())
  {
  }
  static std::unique_ptr<TranscriptTransport> load(const std::string & path);
  std::string complete(const std::vector<ChatMessage> & messages) override;
  /// Requests received so far.
  const std::vector<std::vector<ChatMessage>> & requests() const { return requests_; }

 private:
  std::mutex mu_;
  std::deque<std::string> replies_;
  std::vector<std::vector<ChatMessage>> requests_;
};

/// Three-stage prompting: task and DSL description, reasoning about the
/// behavior (examples and the last failure), then a templated answer.
/// With a concurrent transport, `parallel_queries` chains run at once and
/// the first example-consistent answer (by chain index) wins.
class LlmSynthesizer : public SynthesisOracle
{
 public:
  LlmSynthesizer(std::shared_ptr<ChatTransport> t, std::size_t max_retries = 3)
      : transport_(std::move(t)), max_retries_(max_retries)
  {
  }
  std::string name() const override { return "llm"; }
  Contract synthesize(const SynthTask & task, const SynthBudget & b) override;

  /// The stage prompts for a task (exposed for tests and transcripts).
  static std::vector<std::string> stage_prompts(const SynthTask & task);
  /// Extracts PRECONDITION/POSTCONDITION from a reply and parses them.
  static Contract parse_reply(const std::string & reply, const SynthTask & task);

 private:
  Contract chain(const SynthTask & task, const SynthBudget & b);

  std::shared_ptr<ChatTransport> transport_;
  std::size_t max_retries_;
};

// ---------------------------------------------------------------------------
// External verifiers

/// Harness description of `f` checked against `c`.
HarnessSpec harness_for(const ProcedureRef & f, const ContextPtr & ctx,
                        const Contract & c);

struct ToolConfig
{
  std::string path;
  std::vector<std::string> args;
  std::chrono::milliseconds timeout = std::chrono::seconds(300);
};

/// CBMC on emitted C harnesses; counterexamples come from the JSON trace
/// (`old_<v>` / `new_<v>` assignments).
class CbmcVerifier : public VerificationOracle
{
 public:
  explicit CbmcVerifier(ToolConfig cfg) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "cbmc"; }
  VerifResult verify(const Contract & c, const ProcedureRef & f,
                     const ContextPtr & ctx) override;
  VerifResult verify_pair_impossible(const ProcedureRef & f,
                                     const ExamplePair & pair) override;

 private:
  // `known`: the pair under test; a violation then reproduces it.
  VerifResult run(const HarnessSpec & h, const ContextPtr & ctx,
                  const ProcedureRef & f, const ExamplePair * known);
  ToolConfig cfg_;
};

/// Parses CBMC `--json-ui --trace` output. Pass/Fail/Unknown as for the
/// verifier; Fail pairs are over `ctx` with non-interface slots zero.
VerifResult parse_cbmc_json(const std::string & json, const ContextPtr & ctx,
                            const std::vector<std::string> & interface);

/// Kani on emitted Rust harnesses. Kani does not report post-state values,
/// so a failed contract check is Unknown(unsupported); a failed pair check
/// reproduces the pair and is a Fail.
class KaniVerifier : public VerificationOracle
{
 public:
  explicit KaniVerifier(ToolConfig cfg) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "kani"; }
  VerifResult verify(const Contract & c, const ProcedureRef & f,
                     const ContextPtr & ctx) override;
  VerifResult verify_pair_impossible(const ProcedureRef & f,
                                     const ExamplePair & pair) override;

 private:
  VerifResult run(const HarnessSpec & h, const ExamplePair * known);
  ToolConfig cfg_;
};

/// Dispatches on the procedure's language.
class LanguageVerifier : public VerificationOracle
{
 public:
  std::string name() const override { return "by-language"; }
  void set(Language l, std::shared_ptr<VerificationOracle> o);
  VerificationOracle & get(Language l);
  VerifResult verify(const Contract & c, const ProcedureRef & f,
                     const ContextPtr & ctx) override;
  VerifResult verify_pair_impossible(const ProcedureRef & f,
                                     const ExamplePair & pair) override;

 private:
  std::map<Language, std::shared_ptr<VerificationOracle>> by_lang_;
};

// ---------------------------------------------------------------------------
// Scripted oracles (single consumer)

class ScriptedSynthesizer : public SynthesisOracle
{
 public:
  explicit ScriptedSynthesizer(std::vector<Contract> replies)
      : replies_(replies.begin(), replies.end())
  {
  }
  std::string name() const override { return "scripted"; }
  Contract synthesize(const SynthTask & task, const SynthBudget & b) override;
  std::size_t calls() const { return calls_; }

 private:
  std::deque<Contract> replies_;
  std::size_t calls_ = 0;
};

class ScriptedVerifier : public VerificationOracle
{
 public:
  explicit ScriptedVerifier(std::vector<VerifResult> replies)
      : replies_(replies.begin(), replies.end())
  {
  }
  std::string name() const override { return "scripted"; }
  VerifResult verify(const Contract & c, const ProcedureRef & f,
                     const ContextPtr & ctx) override;
  VerifResult verify_pair_impossible(const ProcedureRef & f,
                                     const ExamplePair & pair) override;
  std::size_t calls() const { return calls_; }

 private:
  VerifResult next();
  std::deque<VerifResult> replies_;
  std::size_t calls_ = 0;
};

}  // namespace pgv
