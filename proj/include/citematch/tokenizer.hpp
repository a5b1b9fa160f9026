#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace citematch {

enum class TokenKind { Letters, Digits, Alphanumeric, Other };

const char* to_string(TokenKind kind);

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Other;
  std::size_t start = 0;  // byte offset into the source string
  std::size_t end = 0;    // exclusive

  bool is_word() const { return kind != TokenKind::Other; }
  bool operator==(const Token&) const = default;
};

// Splits a reference string into maximal letter/digit runs and single
// punctuation characters. Whitespace separates tokens and is dropped.
std::vector<Token> tokenize(std::string_view s);

}  // namespace citematch
