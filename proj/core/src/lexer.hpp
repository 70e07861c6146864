#pragma once

// Tokenizer shared by the contract-language and mini-language parsers.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgv/types.hpp"

namespace pgv::detail {

enum class Tok
{
  Ident,
  Int,
  Punct,
  End
};

struct Token
{
  Tok kind = Tok::End;
  std::string text;               // identifier, punctuation, or literal text
  uint64_t value = 0;             // Int
  std::optional<SemType> suffix;  // Int with a `u8` / `i32` suffix
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::vector<Token> tokenize(std::string_view text);

class TokenStream
{
 public:
  TokenStream(std::string_view text) : text_(text), toks_(tokenize(text)) {}

  const Token & peek(std::size_t k = 0) const
  {
    std::size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token & next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }

  bool is_punct(std::string_view p, std::size_t k = 0) const
  {
    const Token & t = peek(k);
    return t.kind == Tok::Punct && t.text == p;
  }
  bool is_ident(std::string_view id, std::size_t k = 0) const
  {
    const Token & t = peek(k);
    return t.kind == Tok::Ident && t.text == id;
  }
  bool accept_punct(std::string_view p)
  {
    if (is_punct(p)) {
      next();
      return true;
    }
    return false;
  }
  bool accept_ident(std::string_view id)
  {
    if (is_ident(id)) {
      next();
      return true;
    }
    return false;
  }
  const Token & expect_punct(std::string_view p);
  const Token & expect_ident(std::string_view id);
  std::string expect_name();

  std::string_view text() const { return text_; }
  std::size_t offset() const { return peek().begin; }

 private:
  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_keyword(std::string_view id);

}  // namespace pgv::detail
