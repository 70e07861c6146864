#include "pgv/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "pgv/il.hpp"

namespace pgv {

namespace {

using nlohmann::ordered_json;

ordered_json state_json(const Assignment & a)
{
  ordered_json o = ordered_json::object();
  const VarContext & ctx = *a.context();
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    o[ctx.name(i)] = a.get(i).str();
  }
  return o;
}

ordered_json trace_object(const Trace & t)
{
  ordered_json steps = ordered_json::array();
  for (const auto & s : t.steps) {
    ordered_json j;
    j["mode"] = s.mode;
    j["time"] = s.time;
    if (!s.transition.empty()) {
      j["transition"] = s.transition;
    }
    j["state"] = state_json(s.state);
    if (!s.calls.empty()) {
      ordered_json calls = ordered_json::array();
      for (const auto & c : s.calls) {
        calls.push_back({{"procedure", c.procedure}, {"pre", state_json(c.pre)}, {"post", state_json(c.post)}});
      }
      j["calls"] = calls;
    }
    steps.push_back(j);
  }
  return {{"steps", steps}, {"maximal", t.maximal}, {"stuck", t.stuck}};
}

std::string fixed(double s)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

}  // namespace

std::string trace_json(const Trace & t)
{
  return trace_object(t).dump(2) + "\n";
}

std::string report_json(const PolyglotModel & m, const Property & p, const EngineResult & r,
                        const RunMetadata & meta)
{
  ordered_json j;
  j["model"] = m.name;
  j["property"] = p.str();
  j["verdict"] = to_string(r.outcome);
  switch (r.outcome) {
    case Outcome::Pass: j["bound"] = r.bound; break;
    case Outcome::Fail: j["trace"] = trace_object(r.trace); break;
    case Outcome::Inconclusive: j["reason"] = r.reason; break;
  }
  if (!r.warnings.empty()) {
    j["warnings"] = r.warnings;
  }
  ordered_json contracts = ordered_json::object();
  for (const auto & [name, c] : r.contracts) {
    contracts[name] = {{"pre", pretty_print(c.pre)}, {"post", pretty_print(c.post)}};
  }
  j["contracts"] = contracts;
  ordered_json examples = ordered_json::object();
  for (const auto & [name, x] : r.examples) {
    examples[name] = {{"positive", x.positive.size()}, {"negative", x.negative.size()}};
  }
  j["examples"] = examples;
  ordered_json cegis = ordered_json::object();
  for (const auto & [name, k] : r.stats.cegis) {
    cegis[name] = k;
  }
  j["iterations"] = {{"cegis", cegis}, {"cegis_total", r.stats.cegis_total()}, {"cegar", r.stats.cegar}};
  ordered_json md = ordered_json::object();
  for (const auto & [k, v] : meta) {
    md[k] = v;
  }
  j["metadata"] = md;
  j["timing"] = {{"synthesis_s", r.stats.synth_s},
                 {"verification_s", r.stats.verif_s},
                 {"model_checking_s", r.stats.mc_s},
                 {"total_s", r.stats.total_s}};
  return j.dump(2) + "\n";
}

std::string report_text(const PolyglotModel & m, const Property & p, const EngineResult & r,
                        const RunMetadata & meta)
{
  std::ostringstream o;
  o << "model:    " << m.name << "\n";
  o << "property: " << p.str() << "\n";
  o << "verdict:  " << to_string(r.outcome);
  if (r.outcome == Outcome::Pass) {
    o << " (no violation within " << r.bound << " steps)";
  }
  o << "\n";
  if (r.outcome == Outcome::Inconclusive) {
    o << "reason:   " << r.reason << "\n";
  }
  for (const auto & w : r.warnings) {
    o << "warning:  " << w << "\n";
  }
  if (!r.contracts.empty()) {
    o << "\ncontracts:\n";
    for (const auto & [name, c] : r.contracts) {
      o << "  " << name << "\n    pre:  " << pretty_print(c.pre) << "\n    post: " << pretty_print(c.post)
        << "\n";
    }
  }
  if (r.outcome == Outcome::Fail) {
    o << "\ncounterexample:\n" << render_trace(m, r.trace);
  }
  o << "\niterations:\n";
  o << "  CEGAR: " << r.stats.cegar << "\n";
  o << "  CEGIS: " << r.stats.cegis_total();
  for (const auto & [name, k] : r.stats.cegis) {
    o << "  " << name << "=" << k;
  }
  o << "\n";
  if (!meta.empty()) {
    o << "\nmetadata:\n";
    for (const auto & [k, v] : meta) {
      o << "  " << k << ": " << v << "\n";
    }
  }
  o << "\ntiming:\n";
  o << "  synthesis oracle (SOT):    " << fixed(r.stats.synth_s) << " s\n";
  o << "  verification oracle (VOT): " << fixed(r.stats.verif_s) << " s\n";
  o << "  model checking (UT):       " << fixed(r.stats.mc_s) << " s\n";
  o << "  total:                     " << fixed(r.stats.total_s) << " s\n";
  return o.str();
}

}  // namespace pgv
