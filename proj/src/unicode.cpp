#include "citematch/unicode.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace citematch::unicode {

DecodedChar decode_at(std::string_view s, std::size_t offset) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  int32_t i = static_cast<int32_t>(offset);
  const auto n = static_cast<int32_t>(s.size());
  UChar32 c = 0;
  U8_NEXT(bytes, i, n, c);
  if (c < 0) {
    return {U'\uFFFD', 1};
  }
  return {static_cast<char32_t>(c), static_cast<std::size_t>(i) - offset};
}

bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

bool is_digit(char32_t c) {
  return u_charType(static_cast<UChar32>(c)) == U_DECIMAL_DIGIT_NUMBER;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool is_upper(char32_t c) { return u_isupper(static_cast<UChar32>(c)); }

bool is_lower(char32_t c) { return u_islower(static_cast<UChar32>(c)); }

int digit_value(char32_t c) {
  if (!is_digit(c)) return -1;
  return u_charDigitValue(static_cast<UChar32>(c));
}

std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto d = decode_at(s, i);
    out.push_back(d.code);
    i += d.length;
  }
  return out;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

std::string to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    i += decode_at(s, i).length;
    ++n;
  }
  return n;
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
      ++i;
      continue;
    }
    auto d = decode_at(s, i);
    if (d.code == U'\uFFFD' && d.length == 1) {
      out.push_back(s[i]);
    } else {
      append_utf8(out, static_cast<char32_t>(u_tolower(static_cast<UChar32>(d.code))));
    }
    i += d.length;
  }
  return out;
}

}  // namespace citematch::unicode
