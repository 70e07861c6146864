#include "pgv/engine.hpp"

#include <algorithm>
#include <chrono>
#include <future>

#include "pgv/error.hpp"
#include "pgv/il.hpp"

namespace pgv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool contains(const std::vector<ExamplePair> & v, const ExamplePair & x)
{
  return std::find(v.begin(), v.end(), x) != v.end();
}

// First example the contract gets wrong, for synthesizer feedback.
std::string example_mismatch(const Contract & c, const ExampleSets & x)
{
  for (const auto & e : x.positive) {
    if (holds_pre(c.pre, e.pre) && !holds_post(c.post, e.pre, e.post)) {
      return "the candidate excludes the observed behavior " + e.str();
    }
  }
  for (const auto & e : x.negative) {
    if (!holds_pre(c.pre, e.pre) || holds_post(c.post, e.pre, e.post)) {
      return "the candidate admits the impossible behavior " + e.str();
    }
  }
  return {};
}

std::string contract_text(const Contract & c)
{
  return "PRECONDITION: " + pretty_print(c.pre) + " / POSTCONDITION: " + pretty_print(c.post);
}

}  // namespace

std::string to_string(UnknownPolicy p)
{
  return p == UnknownPolicy::Abort ? "abort" : "treat-as-fail";
}

UnknownPolicy parse_unknown_policy(const std::string & s)
{
  if (s == "abort") {
    return UnknownPolicy::Abort;
  }
  if (s == "treat-as-fail" || s == "treat-as-fail-for-synthesis") {
    return UnknownPolicy::TreatAsFail;
  }
  throw PgvError("unknown policy '" + s + "' (expected abort or treat-as-fail)");
}

std::string to_string(Outcome o)
{
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

void EngineConfig::validate() const
{
  if (!synth) {
    throw PgvError("no synthesis oracle configured");
  }
  if (!verifier) {
    throw PgvError("no verification oracle configured");
  }
  if (bound == 0 || max_cegis == 0 || max_cegar == 0) {
    throw PgvError("bound and iteration budgets must be positive");
  }
  if (synth_budget.max_candidates == 0 || synth_budget.max_size == 0 || synth_budget.wall_clock_s <= 0) {
    throw PgvError("synthesis budget must be positive");
  }
}

std::size_t EngineStats::cegis_total() const
{
  std::size_t n = 0;
  for (const auto & [name, k] : cegis) {
    n += k;
  }
  return n;
}

SynthOutcome synth_contract(const ProcedureRef & f, const ContextPtr & ctx, ExampleSets & x,
                            const EngineConfig & cfg)
{
  SynthOutcome out;
  std::string feedback;
  while (out.iterations < cfg.max_cegis) {
    ++out.iterations;
    SynthTask task{&f, ctx, x.positive, x.negative, feedback};
    Contract c;
    auto t0 = Clock::now();
    try {
      c = cfg.synth->synthesize(task, cfg.synth_budget);
    } catch (const NoCandidate & e) {
      out.synth_s += seconds_since(t0);
      out.reason = "synthesis of '" + f.name + "' found no candidate: " + e.what();
      return out;
    }
    out.synth_s += seconds_since(t0);

    try {
      check_contract(c, *ctx);
    } catch (const IlError & e) {
      feedback = std::string("the candidate is not a well-typed contract: ") + e.what();
      continue;
    }
    std::string mismatch = example_mismatch(c, x);
    if (!mismatch.empty()) {
      feedback = mismatch;
      continue;
    }

    t0 = Clock::now();
    VerifResult r = cfg.verifier->verify(c, f, ctx);
    out.verif_s += seconds_since(t0);
    switch (r.verdict) {
      case Verdict::Pass:
        out.contract = std::move(c);
        return out;
      case Verdict::Fail: {
        ExamplePair e = *r.example;
        e.polarity = Polarity::Positive;
        if (contains(x.positive, e)) {
          throw OracleStagnation("verifier repeated counterexample " + e.str() + " for '" + f.name + "'");
        }
        feedback = "the verifier found a behavior the candidate " + contract_text(c) + " excludes: "
                   + e.str();
        x.positive.push_back(std::move(e));
        break;
      }
      case Verdict::Unknown:
        if (cfg.unknown_policy == UnknownPolicy::Abort) {
          out.reason = "verifier could not decide a contract for '" + f.name + "': " + r.str();
          return out;
        }
        feedback = "the verifier could not decide the candidate " + contract_text(c)
                   + "; propose a different one";
        break;
    }
  }
  out.reason = "CEGIS budget of " + std::to_string(cfg.max_cegis) + " iterations exhausted for '"
               + f.name + "'";
  return out;
}

SpuriousOutcome check_spurious(const Trace & t, const ProcedureRef & f, const EngineConfig & cfg)
{
  SpuriousOutcome out;
  auto pairs = extract(t);
  auto it = pairs.find(f.name);
  if (it == pairs.end()) {
    return out;
  }
  for (const auto & pair : it->second) {
    auto t0 = Clock::now();
    VerifResult r = cfg.verifier->verify_pair_impossible(f, pair);
    out.verif_s += seconds_since(t0);
    if (r.verdict == Verdict::Pass) {
      out.negative.push_back(pair);
    } else if (r.verdict == Verdict::Unknown) {
      out.unknown = "could not decide whether '" + f.name + "' can produce " + pair.str() + ": "
                    + r.str();
      return out;
    }
  }
  return out;
}

EngineResult polyver(const PolyglotModel & m, const Property & p, const EngineConfig & cfg)
{
  cfg.validate();
  auto diags = validate_model(m);
  if (!diags.empty()) {
    throw ModelError(diags[0].code + ": " + diags[0].message);
  }

  auto start = Clock::now();
  EngineResult res;
  std::vector<std::string> order = m.procedure_order();
  std::vector<std::string> dirty = order;
  for (const auto & name : order) {
    res.examples[name];
    res.stats.cegis[name] = 0;
  }

  auto finish = [&](Outcome o) {
    res.outcome = o;
    res.stats.total_s = seconds_since(start);
    return res;
  };
  auto inconclusive = [&](std::string why) {
    res.reason = std::move(why);
    return finish(Outcome::Inconclusive);
  };

  try {
    while (res.stats.cegar < cfg.max_cegar) {
      ++res.stats.cegar;

      // CEGIS sweep over procedures whose example sets changed
      std::vector<SynthOutcome> outs(dirty.size());
      if (cfg.concurrent_synthesis && dirty.size() > 1) {
        std::vector<std::future<SynthOutcome>> jobs;
        for (const auto & name : dirty) {
          jobs.push_back(std::async(std::launch::async, [&, name] {
            return synth_contract(m.procedure(name), m.vars, res.examples.at(name), cfg);
          }));
        }
        // wait for all before rethrowing
        for (auto & j : jobs) {
          j.wait();
        }
        for (std::size_t i = 0; i < jobs.size(); ++i) {
          outs[i] = jobs[i].get();
        }
      } else {
        for (std::size_t i = 0; i < dirty.size(); ++i) {
          outs[i] = synth_contract(m.procedure(dirty[i]), m.vars, res.examples.at(dirty[i]), cfg);
        }
      }
      for (std::size_t i = 0; i < dirty.size(); ++i) {
        res.stats.cegis[dirty[i]] += outs[i].iterations;
        res.stats.synth_s += outs[i].synth_s;
        res.stats.verif_s += outs[i].verif_s;
      }
      for (std::size_t i = 0; i < dirty.size(); ++i) {
        if (!outs[i].contract) {
          return inconclusive(outs[i].reason);
        }
        res.contracts[dirty[i]] = *outs[i].contract;
      }
      dirty.clear();

      auto t0 = Clock::now();
      McResult mc;
      try {
        AbstractModel a = induce(m, res.contracts, cfg.solver);
        mc = bmc(a, p, cfg.bound, cfg.solver);
      } catch (const CompositionFailure & e) {
        res.stats.mc_s += seconds_since(t0);
        return inconclusive(std::string("contracts do not compose: ") + e.what());
      }
      res.stats.mc_s += seconds_since(t0);

      if (mc.verdict == McVerdict::Pass) {
        res.bound = mc.bound;
        res.warnings = mc.warnings;
        return finish(Outcome::Pass);
      }
      if (mc.verdict == McVerdict::Unknown) {
        return inconclusive("model checker: " + mc.reason);
      }

      // CEGAR: which calls of the trace are impossible?
      bool refined = false;
      for (const auto & name : order) {
        SpuriousOutcome s = check_spurious(mc.trace, m.procedure(name), cfg);
        res.stats.verif_s += s.verif_s;
        if (s.unknown) {
          return inconclusive(*s.unknown);
        }
        ExampleSets & x = res.examples.at(name);
        bool added = false;
        for (auto & n : s.negative) {
          n.polarity = Polarity::Negative;
          if (!contains(x.negative, n)) {
            x.negative.push_back(std::move(n));
            added = true;
          }
        }
        if (added) {
          dirty.push_back(name);
          refined = true;
        } else if (!s.negative.empty()) {
          throw OracleStagnation("trace repeats excluded behavior of '" + name + "'");
        }
      }
      if (!refined) {
        res.trace = std::move(mc.trace);
        return finish(Outcome::Fail);
      }
    }
    return inconclusive("CEGAR budget of " + std::to_string(cfg.max_cegar) + " iterations exhausted");
  } catch (const PgvError & e) {
    return inconclusive(e.what());
  }
}

}  // namespace pgv
