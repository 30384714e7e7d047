#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mltc::unicode {

/// One decoded unit of a UTF-8 string. Malformed bytes decode to a unit of
/// length 1 with `valid == false` so that callers can copy them through.
struct CodeUnit {
  char32_t cp = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
  bool valid = true;
};

std::vector<CodeUnit> decode(std::string_view text);

bool is_whitespace(char32_t cp) noexcept;
bool is_emoji(char32_t cp) noexcept;
/// Letters, digits, combining marks and `_`. Block-based: punctuation,
/// symbols, spaces, controls and emoji are excluded, everything else counts.
bool is_word(char32_t cp) noexcept;

void append_utf8(std::string& out, char32_t cp);

}  // namespace mltc::unicode
