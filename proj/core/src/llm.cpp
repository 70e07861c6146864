#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "pgv/error.hpp"
#include "pgv/il.hpp"
#include "pgv/minilang.hpp"
#include "pgv/oracles.hpp"

namespace pgv {

namespace {

const char * kDsl = R"(The expression language:
- literals: true, false, decimal integers (typed by context; a suffix such as
  3u8 or -2i4 fixes the type explicitly)
- variables by name; record fields with `.` (e.g. request.value)
- old(v) is the value of v before the call (postconditions only)
- boolean: !a, a && b, a || b, a ==> b
- comparison: ==, !=, and <u <=u >u >=u (unsigned), <s <=s >s >=s (signed)
- arithmetic (wraps around at the type width): a + b, a - b, a * b
- if c then a else b
Operands of a comparison or arithmetic operator must have the same type.)";

std::string join_vars(const ProcedureRef & f, const std::set<std::string> & names,
                      const VarContext & ctx)
{
  std::string out;
  for (const auto & n : names) {
    const SemType * t = ctx.lookup(n);
    out += (out.empty() ? "" : ", ") + n + ": " + (t ? t->str() : "?");
  }
  (void)f;
  return out.empty() ? "(none)" : out;
}

std::string code_of(const ProcedureRef & f)
{
  if (f.language == Language::Mini && f.mini) {
    return print_mini(*f.mini);
  }
  return f.source;
}

// Fenced block content following the last "```" opener, else the whole text.
std::string last_block(const std::string & reply)
{
  std::size_t close = reply.rfind("```");
  if (close == std::string::npos) {
    return reply;
  }
  std::size_t open = reply.rfind("```", close == 0 ? 0 : close - 1);
  if (open == std::string::npos || open == close) {
    return reply;
  }
  std::size_t body = reply.find('\n', open);
  if (body == std::string::npos || body > close) {
    return reply;
  }
  return reply.substr(body + 1, close - body - 1);
}

std::string suggestion_of(const std::string & reasoning)
{
  std::size_t b = reasoning.find('{');
  std::size_t e = reasoning.rfind('}');
  if (b == std::string::npos || e == std::string::npos || e < b) {
    return "";
  }
  try {
    auto j = nlohmann::json::parse(reasoning.substr(b, e - b + 1));
    if (j.contains("suggestion") && j["suggestion"].is_string()) {
      return j["suggestion"].get<std::string>();
    }
  } catch (const nlohmann::json::exception &) {
  }
  return "";
}

}  // namespace

std::vector<std::string> LlmSynthesizer::stage_prompts(const SynthTask & task)
{
  const ProcedureRef & f = *task.procedure;
  const VarContext & ctx = *task.ctx;
  std::set<std::string> inputs = f.reads, outputs = f.writes;
  for (const auto & iv : f.interface) {
    if (!outputs.count(iv.var)) {
      inputs.insert(iv.var);
    }
  }

  std::ostringstream s1;
  s1 << "Your task is to create two Boolean expressions, a precondition and a "
        "postcondition, for a function named '"
     << f.name << "'. Instructions below:\n"
     << "1. Precondition should only depend on inputs.\n"
     << "2. Postcondition can depend on inputs and outputs.\n"
     << "3. Express pre/post-conditions using the following expression language.\n\n"
     << kDsl << "\n";

  std::ostringstream s2;
  s2 << "Describe what the function\n"
     << "1. may assume before it is executed, and\n"
     << "2. guarantees after it is executed. Also,\n"
     << "3. think about additional constraints that would satisfy (eliminate) "
        "positive (negative) examples.\n"
     << "Output a list of the above points and nothing else.\n\n"
     << "The function has the following inputs and outputs:\n"
     << "Inputs: " << join_vars(f, inputs, ctx) << "; Outputs: "
     << join_vars(f, outputs, ctx) << "\n"
     << "Code below (" << to_string(f.language) << "):\n"
     << code_of(f) << "\n";
  if (!task.feedback.empty()) {
    s2 << "\nHere is a counterexample of the previous pre/postconditions:\n"
       << task.feedback << "\n"
       << "Write an explanation of why the pre/postconditions are violated in the form\n"
       << "```json\n{\n  \"explanation\": <EXPLANATION>,\n  \"suggestion\": <SUGGESTION>\n}\n```\n";
  }
  if (!task.positive.empty() || !task.negative.empty()) {
    s2 << "\nLastly, below are some input/output examples. Make sure the "
          "conditions satisfy the positive examples and dissatisfy the negative "
          "examples. Compare the positive and negative examples and deduce what "
          "makes the negative examples invalid behaviors of the code. List "
          "constraints that need to be added to avoid the negative examples.\n\n";
    for (std::size_t i = 0; i < task.positive.size(); ++i) {
      s2 << "Positive example " << i + 1 << ": before " << task.positive[i].pre.str()
         << ", after " << task.positive[i].post.str() << "\n";
    }
    for (std::size_t i = 0; i < task.negative.size(); ++i) {
      s2 << "Negative example " << i + 1 << ": before " << task.negative[i].pre.str()
         << ", after " << task.negative[i].post.str() << "\n";
    }
  }

  std::ostringstream s3;
  s3 << "Based on your analysis, write the precondition and the postcondition "
        "for the code.\nRequirements:\n"
     << "1. Each condition is a single expression of the language above.\n"
     << "2. Relate every output to the inputs if possible, even if it is not used.\n"
     << "3. You may abstract the postcondition by ignoring details and focusing "
        "on the relationship between the inputs and outputs.\n"
     << "4. Use old(v) in the postcondition for the value of v before the call; "
        "a plain v there is the value after the call.\n";
  s3 << "\n**NOTE**: <SUGGESTION> Focus on this when generating pre/postconditions.\n";
  s3 << "\nComplete the block below and put it in a code block.\n"
     << "```\nPRECONDITION: <expression>\nPOSTCONDITION: <expression>\n```\n"
     << "\nBelow is an example.\n"
     << "```\nPRECONDITION: true\nPOSTCONDITION: out.count == old(in.count) && "
        "out.is_present == true\n```\n";
  return {s1.str(), s2.str(), s3.str()};
}

Contract LlmSynthesizer::parse_reply(const std::string & reply, const SynthTask & task)
{
  std::string block = last_block(reply);
  std::optional<std::string> pre, post;
  std::istringstream in(block);
  std::string line;
  std::string * cur = nullptr;
  std::string pre_text, post_text;
  while (std::getline(in, line)) {
    auto starts = [&](const char * k) { return line.rfind(k, 0) == 0; };
    if (starts("PRECONDITION:")) {
      pre_text = line.substr(13);
      pre = "";
      cur = &pre_text;
    } else if (starts("POSTCONDITION:")) {
      post_text = line.substr(14);
      post = "";
      cur = &post_text;
    } else if (cur) {
      *cur += "\n" + line;
    }
  }
  if (!pre || !post) {
    throw SyntaxError("reply lacks PRECONDITION: and POSTCONDITION: lines", 0);
  }
  return parse_contract(pre_text, post_text, *task.ctx);
}

Contract LlmSynthesizer::synthesize(const SynthTask & task, const SynthBudget & b)
{
  std::size_t n = transport_->concurrent() ? std::max<std::size_t>(1, b.parallel_queries) : 1;
  if (n == 1) {
    return chain(task, b);
  }
  std::vector<std::future<Contract>> futs;
  for (std::size_t i = 0; i < n; ++i) {
    futs.push_back(std::async(std::launch::async, [&] { return chain(task, b); }));
  }
  std::vector<Contract> ok;
  std::exception_ptr first_error;
  for (auto & f : futs) {
    try {
      ok.push_back(f.get());
    } catch (const PgvError &) {
      if (!first_error) {
        first_error = std::current_exception();
      }
    }
  }
  for (const auto & c : ok) {
    if (satisfies_examples(c, task.positive, task.negative)) {
      return c;
    }
  }
  if (!ok.empty()) {
    return ok.front();
  }
  std::rethrow_exception(first_error);
}

Contract LlmSynthesizer::chain(const SynthTask & task, const SynthBudget & b)
{
  auto prompts = stage_prompts(task);
  std::vector<ChatMessage> msgs{{"system", prompts[0]}, {"user", prompts[1]}};
  std::string reasoning = transport_->complete(msgs);
  msgs.push_back({"assistant", reasoning});
  std::string gen = prompts[2];
  std::string sugg = suggestion_of(reasoning);
  std::size_t at = gen.find("<SUGGESTION>");
  gen.replace(at, 12, sugg.empty() ? "Satisfy the examples above." : sugg);
  msgs.push_back({"user", gen});

  std::string last_error;
  std::size_t attempts = std::min<std::size_t>(max_retries_ + 1, b.max_candidates);
  for (std::size_t k = 0; k < attempts; ++k) {
    std::string reply = transport_->complete(msgs);
    msgs.push_back({"assistant", reply});
    try {
      return parse_reply(reply, task);
    } catch (const IlError & e) {
      last_error = e.what();
      msgs.push_back({"user", "The conditions could not be used: " + last_error
                                  + "\nFix the error and answer again in the same "
                                    "format."});
    }
  }
  throw NoCandidate("no well-formed contract after " + std::to_string(attempts)
                    + " replies; last error: " + last_error);
}

// ---------------------------------------------------------------------------

std::unique_ptr<TranscriptTransport> TranscriptTransport::load(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw TransportError("cannot read transcript '" + path + "'");
  }
  std::vector<std::string> replies;
  try {
    auto j = nlohmann::json::parse(in);
    for (const auto & r : j.at("records")) {
      replies.push_back(r.at("reply").get<std::string>());
    }
  } catch (const nlohmann::json::exception & e) {
    throw TransportError("malformed transcript '" + path + "': " + e.what());
  }
  return std::make_unique<TranscriptTransport>(std::move(replies));
}

std::string TranscriptTransport::complete(const std::vector<ChatMessage> & messages)
{
  std::lock_guard<std::mutex> lock(mu_);
  requests_.push_back(messages);
  if (replies_.empty()) {
    throw TransportError("transcript exhausted after " + std::to_string(requests_.size() - 1)
                         + " replies");
  }
  std::string r = replies_.front();
  replies_.pop_front();
  return r;
}

}  // namespace pgv
