#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include <json.hpp>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "pgv/oracles.hpp"

namespace pgv {

namespace fs = std::filesystem;

namespace {

// Scratch directory removed on scope exit.
class TempDir
{
 public:
  TempDir()
  {
    std::string tmpl = (fs::temp_directory_path() / "pgv-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) {
      throw OracleError("cannot create a temporary directory");
    }
    path_ = tmpl;
  }
  ~TempDir()
  {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path & path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path & p, const std::string & text)
{
  std::ofstream out(p);
  out << text;
  if (!out) {
    throw OracleError("cannot write " + p.string());
  }
}

std::vector<std::string> var_names(const ProcedureRef & f, const VarContext & ctx)
{
  std::vector<std::string> out;
  auto vs = f.vars();
  for (const auto & [name, type] : ctx.vars()) {
    if (vs.count(name)) {
      out.push_back(name);
    }
  }
  return out;
}

// Leaf term for slot `s` (v, v.f, v.f.g), optionally under old().
Expr slot_term(const VarContext & ctx, const Slot & s, bool old)
{
  const std::string & var = ctx.name(s.var);
  Expr e = old ? Expr::old(var) : Expr::var(var);
  const SemType * t = &ctx.type(s.var);
  for (int fi : s.fields) {
    const Field & f = t->fields()[static_cast<std::size_t>(fi)];
    e = Expr::select(e, f.name);
    t = &f.type;
  }
  return e;
}

Expr slot_literal(const SemType & t, uint64_t bits)
{
  return t.is_bool() ? Expr::bool_lit(bits != 0) : Expr::int_lit(t, bits);
}

// (P, Q) = (V == d, !(V == d')) restricted to the procedure's variables.
Contract pair_contract(const ProcedureRef & f, const ExamplePair & pair)
{
  const VarContext & ctx = *pair.pre.context();
  auto vs = f.vars();
  Expr pre = Expr::bool_lit(true), post = Expr::bool_lit(true);
  bool first = true;
  for (std::size_t i = 0; i < ctx.slots().size(); ++i) {
    const Slot & s = ctx.slots()[i];
    if (!vs.count(ctx.name(s.var))) {
      continue;
    }
    Expr p = Expr::binary(Op::Eq, slot_term(ctx, s, false), slot_literal(s.type, pair.pre.slot(i)));
    Expr q = Expr::binary(Op::Eq, slot_term(ctx, s, false), slot_literal(s.type, pair.post.slot(i)));
    pre = first ? p : Expr::binary(Op::And, pre, p);
    post = first ? q : Expr::binary(Op::And, post, q);
    first = false;
  }
  return {pre, Expr::lnot(post)};
}

std::optional<uint64_t> json_bits(const nlohmann::json & v, const SemType & t)
{
  if (v.contains("binary") && v["binary"].is_string()) {
    uint64_t bits = 0;
    for (char ch : v["binary"].get<std::string>()) {
      if (ch != '0' && ch != '1') {
        return std::nullopt;
      }
      bits = (bits << 1) | static_cast<uint64_t>(ch - '0');
    }
    return bits & t.mask();
  }
  if (!v.contains("data") || !v["data"].is_string()) {
    return std::nullopt;
  }
  std::string d = v["data"].get<std::string>();
  if (d == "true" || d == "TRUE") {
    return 1;
  }
  if (d == "false" || d == "FALSE") {
    return 0;
  }
  try {
    std::size_t used = 0;
    long long n = std::stoll(d, &used, 0);
    if (used != d.size()) {
      return std::nullopt;
    }
    return static_cast<uint64_t>(n) & t.mask();
  } catch (const std::exception &) {
    return std::nullopt;
  }
}

// Stores a trace value for `path` (relative to variable `var`) into `a`.
// Struct values recurse through their members.
void store(Assignment & a, const VarContext & ctx, std::size_t var, const SemType & t,
           std::vector<int> fields, const nlohmann::json & v, std::set<std::size_t> & seen)
{
  if (t.is_record()) {
    if (!v.contains("members") || !v["members"].is_array()) {
      return;
    }
    for (const auto & m : v["members"]) {
      if (!m.contains("name") || !m.contains("value")) {
        continue;
      }
      int fi = t.field_index(m["name"].get<std::string>());
      if (fi < 0) {
        continue;
      }
      auto sub = fields;
      sub.push_back(fi);
      store(a, ctx, var, t.fields()[static_cast<std::size_t>(fi)].type, sub, m["value"], seen);
    }
    return;
  }
  auto bits = json_bits(v, t);
  if (!bits) {
    return;
  }
  std::size_t slot = ctx.slot_of(var, fields);
  a.set_slot(slot, *bits);
  seen.insert(slot);
}

// Resolves "x.f.g" below variable type `t` into field indices.
std::optional<std::pair<const SemType *, std::vector<int>>>
resolve_path(const SemType & t, const std::string & rest)
{
  const SemType * cur = &t;
  std::vector<int> fields;
  std::size_t pos = 0;
  while (pos < rest.size()) {
    if (rest[pos] != '.' || !cur->is_record()) {
      return std::nullopt;
    }
    std::size_t end = rest.find('.', pos + 1);
    std::string name = rest.substr(pos + 1, end == std::string::npos ? end : end - pos - 1);
    int fi = cur->field_index(name);
    if (fi < 0) {
      return std::nullopt;
    }
    fields.push_back(fi);
    cur = &cur->fields()[static_cast<std::size_t>(fi)].type;
    pos = end == std::string::npos ? rest.size() : end;
  }
  return std::make_pair(cur, fields);
}

std::string tool_bounds(const ToolConfig & cfg)
{
  std::string out;
  for (const auto & a : cfg.args) {
    out += (out.empty() ? "" : " ") + a;
  }
  return out;
}

}  // namespace

HarnessSpec harness_for(const ProcedureRef & f, const ContextPtr & ctx, const Contract & c)
{
  HarnessSpec h;
  h.entry = f.entry.empty() ? f.name : f.entry;
  h.procedure_source = f.source;
  h.preamble = f.preamble;
  h.call = f.call;
  h.contract = c;
  auto vs = f.vars();
  for (const auto & [name, type] : ctx->vars()) {
    if (!vs.count(name)) {
      continue;
    }
    HarnessVar hv;
    hv.name = name;
    hv.type = type;
    hv.role = f.writes.count(name) ? (f.reads.count(name) ? VarRole::State : VarRole::Output)
                                   : VarRole::Input;
    for (const auto & iv : f.interface) {
      if (iv.var == name) {
        hv.binding = iv.binding;
        hv.target_type = iv.target_type;
        hv.role = iv.role;
      }
    }
    h.vars.push_back(std::move(hv));
  }
  return h;
}

VerifResult parse_cbmc_json(const std::string & json, const ContextPtr & ctx,
                            const std::vector<std::string> & interface)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception & e) {
    return VerifResult::unknown(UnknownReason::ToolError,
                                std::string("unreadable CBMC output: ") + e.what());
  }
  if (!doc.is_array()) {
    return VerifResult::unknown(UnknownReason::ToolError, "CBMC output is not a message list");
  }
  std::string status;
  const nlohmann::json * failed = nullptr;
  std::string errors;
  for (const auto & msg : doc) {
    if (msg.contains("cProverStatus")) {
      status = msg["cProverStatus"].get<std::string>();
    }
    if (msg.contains("messageType") && msg["messageType"] == "ERROR" && msg.contains("messageText")) {
      errors += msg["messageText"].get<std::string>() + "; ";
    }
    if (msg.contains("result") && msg["result"].is_array()) {
      for (const auto & r : msg["result"]) {
        if (!failed && r.value("status", "") == "FAILURE") {
          failed = &r;
        }
      }
    }
  }
  if (status == "success") {
    return VerifResult::pass();
  }
  if (status != "failure") {
    return VerifResult::unknown(UnknownReason::ToolError,
                                errors.empty() ? "CBMC reported no verdict" : errors);
  }
  if (!failed || !failed->contains("trace")) {
    return VerifResult::unknown(UnknownReason::Unsupported, "CBMC failure without a trace");
  }

  Assignment pre(ctx), post(ctx);
  std::set<std::size_t> seen_pre, seen_post;
  for (const auto & step : (*failed)["trace"]) {
    if (step.value("stepType", "") != "assignment" || !step.contains("lhs")
        || !step.contains("value")) {
      continue;
    }
    std::string lhs = step["lhs"].get<std::string>();
    bool is_old = lhs.rfind("old_", 0) == 0;
    bool is_new = lhs.rfind("new_", 0) == 0;
    if (!is_old && !is_new) {
      continue;
    }
    std::string rest = lhs.substr(4);
    for (const auto & name : interface) {
      if (rest.compare(0, name.size(), name) != 0
          || (rest.size() > name.size() && rest[name.size()] != '.')) {
        continue;
      }
      auto var = ctx->index_of(name);
      if (!var) {
        continue;
      }
      auto at = resolve_path(ctx->type(*var), rest.substr(name.size()));
      if (!at) {
        continue;
      }
      store(is_old ? pre : post, *ctx, *var, *at->first, at->second, step["value"],
            is_old ? seen_pre : seen_post);
    }
  }
  for (const auto & name : interface) {
    auto var = ctx->index_of(name);
    if (!var) {
      continue;
    }
    std::size_t first = ctx->slot_offset(*var);
    std::size_t n = ctx->type(*var).slot_count();
    for (std::size_t s = first; s < first + n; ++s) {
      if (!seen_pre.count(s) || !seen_post.count(s)) {
        return VerifResult::unknown(UnknownReason::Unsupported,
                                    "CBMC trace lacks a value for '" + ctx->slots()[s].path + "'");
      }
    }
  }
  return VerifResult::fail({pre, post, Polarity::Positive});
}

VerifResult CbmcVerifier::run(const HarnessSpec & h, const ContextPtr & ctx,
                              const ProcedureRef & f, const ExamplePair * known)
{
  std::string text = emit_cbmc_harness(h);
  TempDir dir;
  fs::path file = dir.path() / "harness.c";
  write_file(file, text);
  std::vector<std::string> argv{cfg_.path.empty() ? "cbmc" : cfg_.path, file.string(),
                                "--json-ui", "--trace"};
  argv.insert(argv.end(), cfg_.args.begin(), cfg_.args.end());
  ProcessResult r = run_process(argv, "", cfg_.timeout, dir.path());
  if (r.timed_out) {
    return VerifResult::unknown(UnknownReason::Timeout, "CBMC timed out on " + f.name);
  }
  if (r.exit_code == 127) {
    return VerifResult::unknown(UnknownReason::ToolError, r.err);
  }
  VerifResult v = parse_cbmc_json(r.out, ctx, var_names(f, *ctx));
  if (known && (v.verdict == Verdict::Fail
                || (v.verdict == Verdict::Unknown && v.reason == UnknownReason::Unsupported))) {
    return VerifResult::fail(*known);
  }
  if (v.verdict == Verdict::Unknown && v.reason == UnknownReason::ToolError) {
    v.detail += " (exit " + std::to_string(r.exit_code) + ")";
  }
  if (v.verdict == Verdict::Pass && !cfg_.args.empty()) {
    v.detail = "bounds: " + tool_bounds(cfg_);
  }
  return v;
}

VerifResult CbmcVerifier::verify(const Contract & c, const ProcedureRef & f,
                                 const ContextPtr & ctx)
{
  check_contract(c, *ctx);
  return run(harness_for(f, ctx, c), ctx, f, nullptr);
}

VerifResult CbmcVerifier::verify_pair_impossible(const ProcedureRef & f,
                                                 const ExamplePair & pair)
{
  const ContextPtr & ctx = pair.pre.context();
  ExamplePair known{pair.pre, pair.post, Polarity::Positive};
  return run(harness_for(f, ctx, pair_contract(f, pair)), ctx, f, &known);
}

// ---------------------------------------------------------------------------

VerifResult KaniVerifier::run(const HarnessSpec & h, const ExamplePair * known)
{
  std::string text = emit_kani_harness(h);
  TempDir dir;
  fs::path file = dir.path() / "harness.rs";
  write_file(file, text);
  std::vector<std::string> argv{cfg_.path.empty() ? "kani" : cfg_.path, file.string(),
                                "--harness", "check_" + h.entry};
  argv.insert(argv.end(), cfg_.args.begin(), cfg_.args.end());
  ProcessResult r = run_process(argv, "", cfg_.timeout, dir.path());
  if (r.timed_out) {
    return VerifResult::unknown(UnknownReason::Timeout, "Kani timed out on " + h.entry);
  }
  if (r.exit_code == 127) {
    return VerifResult::unknown(UnknownReason::ToolError, r.err);
  }
  static const std::regex ok(R"(VERIFICATION:-\s*SUCCESSFUL)");
  static const std::regex bad(R"(VERIFICATION:-\s*FAILED)");
  if (std::regex_search(r.out, ok)) {
    VerifResult v = VerifResult::pass();
    if (!cfg_.args.empty()) {
      v.detail = "bounds: " + tool_bounds(cfg_);
    }
    return v;
  }
  if (std::regex_search(r.out, bad)) {
    if (known) {
      return VerifResult::fail(*known);
    }
    // Kani reports failing checks but not the post-state of the harness
    // variables, so no example pair can be built.
    return VerifResult::unknown(UnknownReason::Unsupported,
                                "Kani found a violation in " + h.entry
                                    + " but its counterexample values are not recoverable");
  }
  return VerifResult::unknown(UnknownReason::ToolError,
                              "Kani gave no verdict (exit " + std::to_string(r.exit_code)
                                  + "): " + r.err.substr(0, 300));
}

VerifResult KaniVerifier::verify(const Contract & c, const ProcedureRef & f,
                                 const ContextPtr & ctx)
{
  check_contract(c, *ctx);
  return run(harness_for(f, ctx, c), nullptr);
}

VerifResult KaniVerifier::verify_pair_impossible(const ProcedureRef & f,
                                                 const ExamplePair & pair)
{
  ExamplePair known{pair.pre, pair.post, Polarity::Positive};
  return run(harness_for(f, pair.pre.context(), pair_contract(f, pair)), &known);
}

}  // namespace pgv
