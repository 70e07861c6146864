#include "pgv/oracles.hpp"

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "pgv/minilang.hpp"

namespace pgv {

std::string ExamplePair::str() const
{
  return std::string(polarity == Polarity::Positive ? "+ " : "- ") + pre.str()
         + " -> " + post.str();
}

std::string to_string(Verdict v)
{
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

std::string to_string(UnknownReason r)
{
  switch (r) {
    case UnknownReason::None: return "none";
    case UnknownReason::Timeout: return "timeout";
    case UnknownReason::ToolError: return "tool-error";
    case UnknownReason::Unsupported: return "unsupported";
  }
  return "?";
}

std::string VerifResult::str() const
{
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail " + (example ? example->str() : std::string());
    case Verdict::Unknown: return "unknown(" + to_string(reason) + "): " + detail;
  }
  return "?";
}

bool satisfies_examples(const Contract & c, const std::vector<ExamplePair> & pos,
                        const std::vector<ExamplePair> & neg)
{
  for (const auto & x : pos) {
    if (holds_pre(c.pre, x.pre) && !holds_post(c.post, x.pre, x.post)) {
      return false;
    }
  }
  for (const auto & x : neg) {
    if (!holds_pre(c.pre, x.pre) || holds_post(c.post, x.pre, x.post)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

VerifResult MiniVerifier::verify(const Contract & c, const ProcedureRef & f,
                                 const ContextPtr & ctx)
{
  if (!f.mini) {
    return VerifResult::unknown(UnknownReason::Unsupported,
                                "procedure '" + f.name + "' has no mini body");
  }
  check_contract(c, *ctx);
  try {
    BruteResult r = brute_verify(c, *f.mini, max_bits_);
    if (r.pass) {
      return VerifResult::pass();
    }
    return VerifResult::fail({r.pre, r.post, Polarity::Positive});
  } catch (const DomainTooLarge & e) {
    return VerifResult::unknown(UnknownReason::Unsupported, e.what());
  } catch (const RangeTooLarge & e) {
    return VerifResult::unknown(UnknownReason::Unsupported, e.what());
  }
}

VerifResult MiniVerifier::verify_pair_impossible(const ProcedureRef & f,
                                                 const ExamplePair & pair)
{
  if (!f.mini) {
    return VerifResult::unknown(UnknownReason::Unsupported,
                                "procedure '" + f.name + "' has no mini body");
  }
  try {
    if (mini_can_produce(*f.mini, pair.pre, pair.post)) {
      return VerifResult::fail({pair.pre, pair.post, Polarity::Positive});
    }
    return VerifResult::pass();
  } catch (const RangeTooLarge & e) {
    return VerifResult::unknown(UnknownReason::Unsupported, e.what());
  }
}

// ---------------------------------------------------------------------------

void LanguageVerifier::set(Language l, std::shared_ptr<VerificationOracle> o)
{
  by_lang_[l] = std::move(o);
}

VerificationOracle & LanguageVerifier::get(Language l)
{
  auto it = by_lang_.find(l);
  if (it == by_lang_.end() || !it->second) {
    throw OracleError("no verifier configured for " + to_string(l) + " procedures");
  }
  return *it->second;
}

VerifResult LanguageVerifier::verify(const Contract & c, const ProcedureRef & f,
                                     const ContextPtr & ctx)
{
  return get(f.language).verify(c, f, ctx);
}

VerifResult LanguageVerifier::verify_pair_impossible(const ProcedureRef & f,
                                                     const ExamplePair & pair)
{
  return get(f.language).verify_pair_impossible(f, pair);
}

// ---------------------------------------------------------------------------

Contract ScriptedSynthesizer::synthesize(const SynthTask &, const SynthBudget &)
{
  ++calls_;
  if (replies_.empty()) {
    throw ScriptExhausted("scripted synthesizer has no reply for call "
                          + std::to_string(calls_));
  }
  Contract c = replies_.front();
  replies_.pop_front();
  return c;
}

VerifResult ScriptedVerifier::next()
{
  ++calls_;
  if (replies_.empty()) {
    throw ScriptExhausted("scripted verifier has no reply for call "
                          + std::to_string(calls_));
  }
  VerifResult r = replies_.front();
  replies_.pop_front();
  return r;
}

VerifResult ScriptedVerifier::verify(const Contract &, const ProcedureRef &,
                                     const ContextPtr &)
{
  return next();
}

VerifResult ScriptedVerifier::verify_pair_impossible(const ProcedureRef &,
                                                     const ExamplePair &)
{
  return next();
}

}  // namespace pgv
