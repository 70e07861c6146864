#pragma once

#include <map>
#include <string>

#include "pgv/engine.hpp"

namespace pgv {

/// Environment metadata recorded alongside a verdict (tool versions, solver
/// identity, seeds, configuration). Kept sorted so reports are stable.
using RunMetadata = std::map<std::string, std::string>;

/// A trace as JSON (steps with mode, time, transition, state, calls).
std::string trace_json(const Trace & t);

/// Machine-readable report. Everything except the "timing" object is a
/// function of the inputs and the oracles' answers.
std::string report_json(const PolyglotModel & m, const Property & p, const EngineResult & r,
                        const RunMetadata & meta);

/// Human-readable report with the same content; timing comes last.
std::string report_text(const PolyglotModel & m, const Property & p, const EngineResult & r,
                        const RunMetadata & meta);

}  // namespace pgv
