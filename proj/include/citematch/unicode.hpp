#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace citematch::unicode {

struct DecodedChar {
  char32_t code;
  std::size_t length;  // bytes consumed; 1 for an invalid byte (decoded as U+FFFD)
};

DecodedChar decode_at(std::string_view s, std::size_t offset);

bool is_letter(char32_t c);
bool is_digit(char32_t c);
bool is_space(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
// Decimal value of a digit code point, -1 if it is not one.
int digit_value(char32_t c);

std::u32string to_u32(std::string_view s);
std::string to_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t c);

// Number of code points.
std::size_t length(std::string_view s);

// Per-code-point simple case mapping. Invalid bytes pass through unchanged.
std::string to_lower(std::string_view s);

}  // namespace citematch::unicode
