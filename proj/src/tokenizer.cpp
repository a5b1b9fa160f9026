#include "citematch/tokenizer.hpp"

#include "citematch/unicode.hpp"

namespace citematch {

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Letters: return "Letters";
    case TokenKind::Digits: return "Digits";
    case TokenKind::Alphanumeric: return "Alphanumeric";
    case TokenKind::Other: return "Other";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    auto d = unicode::decode_at(s, i);
    if (unicode::is_space(d.code)) {
      i += d.length;
      continue;
    }
    const bool letter = unicode::is_letter(d.code);
    const bool digit = !letter && unicode::is_digit(d.code);
    if (!letter && !digit) {
      tokens.push_back({std::string(s.substr(i, d.length)), TokenKind::Other, i, i + d.length});
      i += d.length;
      continue;
    }
    const std::size_t start = i;
    bool has_letter = false;
    bool has_digit = false;
    while (i < s.size()) {
      auto e = unicode::decode_at(s, i);
      if (unicode::is_letter(e.code)) {
        has_letter = true;
      } else if (unicode::is_digit(e.code)) {
        has_digit = true;
      } else {
        break;
      }
      i += e.length;
    }
    TokenKind kind = has_letter && has_digit ? TokenKind::Alphanumeric
                     : has_letter            ? TokenKind::Letters
                                             : TokenKind::Digits;
    tokens.push_back({std::string(s.substr(start, i - start)), kind, start, i});
  }
  return tokens;
}

}  // namespace citematch
