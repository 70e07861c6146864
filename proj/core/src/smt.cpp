#include "pgv/smt.hpp"

#include <cctype>
#include <optional>

#include "pgv/error.hpp"

namespace pgv {

namespace {

// Length of the first complete S-expression in `s` (leading whitespace
// included), or nullopt if `s` holds only a prefix of one.
std::optional<std::size_t> sexp_end(const std::string & s)
{
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
    ++i;
  }
  if (i == s.size()) {
    return std::nullopt;
  }
  int depth = 0;
  bool started = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') {
      std::size_t j = i + 1;
      for (; j < s.size(); ++j) {
        if (s[j] == '"') {
          if (j + 1 < s.size() && s[j + 1] == '"') {
            ++j;
            continue;
          }
          break;
        }
      }
      if (j >= s.size()) {
        return std::nullopt;
      }
      i = j;
      started = true;
    } else if (c == '|') {
      std::size_t j = s.find('|', i + 1);
      if (j == std::string::npos) {
        return std::nullopt;
      }
      i = j;
      started = true;
    } else if (c == ';') {
      std::size_t j = s.find('\n', i);
      if (j == std::string::npos) {
        return std::nullopt;
      }
      i = j;
    } else if (c == '(') {
      ++depth;
      started = true;
    } else if (c == ')') {
      --depth;
      if (depth == 0) {
        return i + 1;
      }
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (started && depth == 0) {
        return i;
      }
    } else {
      started = true;
    }
  }
  return std::nullopt;
}

struct SexpParser
{
  std::string_view s;
  std::size_t i = 0;

  void skip()
  {
    while (i < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
      } else if (s[i] == ';') {
        while (i < s.size() && s[i] != '\n') {
          ++i;
        }
      } else {
        break;
      }
    }
  }

  Sexp parse()
  {
    skip();
    if (i >= s.size()) {
      throw SolverError("unexpected end of solver output");
    }
    Sexp out;
    if (s[i] == '(') {
      ++i;
      out.is_atom = false;
      for (;;) {
        skip();
        if (i >= s.size()) {
          throw SolverError("unbalanced solver output");
        }
        if (s[i] == ')') {
          ++i;
          return out;
        }
        out.list.push_back(parse());
      }
    }
    if (s[i] == ')') {
      throw SolverError("unexpected ')' in solver output");
    }
    std::size_t b = i;
    if (s[i] == '|') {
      std::size_t e = s.find('|', i + 1);
      i = e == std::string_view::npos ? s.size() : e + 1;
    } else if (s[i] == '"') {
      ++i;
      while (i < s.size()) {
        if (s[i] == '"' && !(i + 1 < s.size() && s[i + 1] == '"')) {
          ++i;
          break;
        }
        i += s[i] == '"' ? 2 : 1;
      }
    } else {
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))
             && s[i] != '(' && s[i] != ')') {
        ++i;
      }
    }
    out.atom = std::string(s.substr(b, i - b));
    return out;
  }
};

}  // namespace

Sexp Sexp::parse(std::string_view text)
{
  SexpParser p{text};
  return p.parse();
}

std::string Sexp::str() const
{
  if (is_atom) {
    return atom;
  }
  std::string out = "(";
  for (std::size_t i = 0; i < list.size(); ++i) {
    out += (i ? " " : "") + list[i].str();
  }
  return out + ")";
}

uint64_t parse_smt_bits(const Sexp & v)
{
  if (v.is_atom) {
    const std::string & a = v.atom;
    if (a == "true") {
      return 1;
    }
    if (a == "false") {
      return 0;
    }
    if (a.size() > 2 && a[0] == '#' && (a[1] == 'b' || a[1] == 'x')) {
      if ((a[1] == 'b' && a.size() - 2 > 64) || (a[1] == 'x' && a.size() - 2 > 16)) {
        throw SolverError("bitvector value too wide: " + a);
      }
      return std::stoull(a.substr(2), nullptr, a[1] == 'b' ? 2 : 16);
    }
  } else if (v.list.size() == 3 && v.list[0].is_atom && v.list[0].atom == "_"
             && v.list[1].is_atom && v.list[1].atom.rfind("bv", 0) == 0) {
    return std::stoull(v.list[1].atom.substr(2));
  }
  throw SolverError("cannot read solver value '" + v.str() + "'");
}

SmtSession::SmtSession(const SolverConfig & cfg) : cfg_(cfg)
{
  std::vector<std::string> argv{cfg.path};
  argv.insert(argv.end(), cfg.args.begin(), cfg.args.end());
  pipe_ = std::make_unique<Pipe>(argv);
  command("(set-option :print-success true)");
  command("(set-option :produce-models true)");
  command("(set-logic QF_BV)");
}

Sexp SmtSession::read()
{
  std::string text = pipe_->read_until(sexp_end, cfg_.timeout);
  return Sexp::parse(text);
}

void SmtSession::command(const std::string & cmd)
{
  log_ += cmd;
  log_ += '\n';
  pipe_->write(cmd + "\n");
  Sexp r = read();
  if (!(r.is_atom && r.atom == "success")) {
    throw SolverError("solver rejected '" + cmd.substr(0, 200) + "': " + r.str());
  }
}

void SmtSession::declare(const std::string & symbol, const std::string & sort)
{
  command("(declare-fun " + symbol + " () " + sort + ")");
}

void SmtSession::assert_term(const std::string & term)
{
  command("(assert " + term + ")");
}

SatResult SmtSession::check_sat()
{
  log_ += "(check-sat)\n";
  pipe_->write("(check-sat)\n");
  Sexp r = read();
  if (r.is_atom && r.atom == "sat") {
    return SatResult::Sat;
  }
  if (r.is_atom && r.atom == "unsat") {
    return SatResult::Unsat;
  }
  if (r.is_atom && r.atom == "unknown") {
    return SatResult::Unknown;
  }
  throw SolverError("unexpected check-sat answer: " + r.str());
}

std::vector<Sexp> SmtSession::get_values(const std::vector<std::string> & terms)
{
  std::vector<Sexp> out;
  if (terms.empty()) {
    return out;
  }
  std::string cmd = "(get-value (";
  for (const auto & t : terms) {
    cmd += t + " ";
  }
  cmd += "))";
  log_ += cmd + "\n";
  pipe_->write(cmd + "\n");
  Sexp r = read();
  if (r.is_atom || r.list.size() != terms.size()) {
    throw SolverError("unexpected get-value answer: " + r.str().substr(0, 200));
  }
  for (auto & pair : r.list) {
    if (pair.is_atom || pair.list.size() != 2) {
      throw SolverError("unexpected get-value entry: " + pair.str());
    }
    out.push_back(std::move(pair.list[1]));
  }
  return out;
}

std::vector<uint64_t> SmtSession::get_bits(const std::vector<std::string> & terms)
{
  std::vector<uint64_t> out;
  for (const auto & v : get_values(terms)) {
    out.push_back(parse_smt_bits(v));
  }
  return out;
}

std::string SmtSession::identity()
{
  std::string out;
  for (const char * key : {":name", ":version"}) {
    pipe_->write(std::string("(get-info ") + key + ")\n");
    Sexp r = read();
    if (!r.is_atom && r.list.size() == 2) {
      std::string v = r.list[1].atom;
      if (v.size() >= 2 && v.front() == '"') {
        v = v.substr(1, v.size() - 2);
      }
      out += (out.empty() ? "" : " ") + v;
    }
  }
  return out;
}

}  // namespace pgv
