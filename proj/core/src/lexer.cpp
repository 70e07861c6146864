#include "lexer.hpp"

#include <array>
#include <cctype>

#include "pgv/error.hpp"

namespace pgv::detail {

namespace {

bool ident_start(char c)
{
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Longest match first.
constexpr std::array<std::string_view, 37> kPuncts = {
    "==>", "<=u", "<=s", ">=u", ">=s", "<u", "<s", ">u", ">s", "==",
    "!=",  "<=",  ">=",  "&&",  "||",  ":=", "..", "<",  ">",  "!",
    "+",   "-",   "*",   "(",   ")",   "{",  "}",  "[",  "]",  ".",
    ",",   ";",   ":",   "=",   "/",   "%",  "&"};

}  // namespace

bool is_keyword(std::string_view id)
{
  return id == "true" || id == "false" || id == "old" || id == "if"
         || id == "then" || id == "else" || id == "havoc" || id == "skip"
         || id == "in";
}

std::vector<Token> tokenize(std::string_view s)
{
  std::vector<Token> out;
  std::size_t i = 0;
  while (true) {
    // whitespace and comments
    while (i < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
      } else if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '/') {
        while (i < s.size() && s[i] != '\n') {
          ++i;
        }
      } else if (s[i] == '#') {
        while (i < s.size() && s[i] != '\n') {
          ++i;
        }
      } else {
        break;
      }
    }
    Token t;
    t.begin = i;
    if (i >= s.size()) {
      t.kind = Tok::End;
      t.end = i;
      out.push_back(t);
      return out;
    }
    char c = s[i];
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) {
        ++j;
      }
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      t.end = j;
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      uint64_t v = 0;
      bool overflow = false;
      if (c == '0' && j + 1 < s.size() && (s[j + 1] == 'x' || s[j + 1] == 'X')) {
        j += 2;
        std::size_t start = j;
        while (j < s.size() && std::isxdigit(static_cast<unsigned char>(s[j]))) {
          unsigned d = std::isdigit(static_cast<unsigned char>(s[j]))
                           ? unsigned(s[j] - '0')
                           : unsigned(std::tolower(s[j]) - 'a' + 10);
          if (v >> 60) {
            overflow = true;
          }
          v = (v << 4) | d;
          ++j;
        }
        if (start == j) {
          throw SyntaxError("malformed hexadecimal literal", i);
        }
      } else {
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          unsigned d = unsigned(s[j] - '0');
          if (v > (UINT64_MAX - d) / 10) {
            overflow = true;
          }
          v = v * 10 + d;
          ++j;
        }
      }
      if (overflow) {
        throw SyntaxError("integer literal does not fit in 64 bits", i);
      }
      t.kind = Tok::Int;
      t.value = v;
      // optional width suffix
      if (j < s.size() && (s[j] == 'u' || s[j] == 'i')) {
        std::size_t k = j + 1;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          ++k;
        }
        if (k == j + 1 || (k < s.size() && ident_char(s[k]))) {
          throw SyntaxError("malformed literal suffix", j);
        }
        unsigned width = static_cast<unsigned>(std::stoul(std::string(s.substr(j + 1, k - j - 1))));
        if (width < 1 || width > 64) {
          throw SyntaxError("literal width must be in 1..64", j);
        }
        t.suffix = s[j] == 'u' ? SemType::uint(width) : SemType::sint(width);
        j = k;
      } else if (j < s.size() && ident_char(s[j])) {
        throw SyntaxError("malformed integer literal", i);
      }
      t.text = std::string(s.substr(i, j - i));
      t.end = j;
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (auto p : kPuncts) {
      if (s.substr(i, p.size()) != p) {
        continue;
      }
      // `<u`, `>=s`, ... only when the suffix letter ends the token
      char last = p.back();
      if ((last == 'u' || last == 's') && i + p.size() < s.size()
          && ident_char(s[i + p.size()])) {
        continue;
      }
      t.kind = Tok::Punct;
      t.text = std::string(p);
      t.end = i + p.size();
      i += p.size();
      matched = true;
      break;
    }
    if (!matched) {
      throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back(std::move(t));
  }
}

const Token & TokenStream::expect_punct(std::string_view p)
{
  if (!is_punct(p)) {
    throw SyntaxError("expected '" + std::string(p) + "'", offset());
  }
  return next();
}

const Token & TokenStream::expect_ident(std::string_view id)
{
  if (!is_ident(id)) {
    throw SyntaxError("expected '" + std::string(id) + "'", offset());
  }
  return next();
}

std::string TokenStream::expect_name()
{
  const Token & t = peek();
  if (t.kind != Tok::Ident || is_keyword(t.text)) {
    throw SyntaxError("expected a name", t.begin);
  }
  return next().text;
}

}  // namespace pgv::detail
