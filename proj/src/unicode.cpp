#include "mltc/unicode.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace mltc::unicode {

namespace {

using Range = std::pair<char32_t, char32_t>;

bool in_ranges(char32_t cp, std::span<const Range> ranges) {
  // ranges are sorted and disjoint
  auto it = std::upper_bound(ranges.begin(), ranges.end(), cp,
                             [](char32_t c, const Range& r) { return c < r.first; });
  if (it == ranges.begin()) return false;
  --it;
  return cp <= it->second;
}

constexpr std::array<Range, 11> kSpaces{{
    {0x0009, 0x000D},
    {0x0020, 0x0020},
    {0x0085, 0x0085},
    {0x00A0, 0x00A0},
    {0x1680, 0x1680},
    {0x2000, 0x200A},
    {0x2028, 0x2029},
    {0x202F, 0x202F},
    {0x205F, 0x205F},
    {0x3000, 0x3000},
    {0xFEFF, 0xFEFF},
}};

// Emoji-bearing blocks, plus the joiner, keycap and variation selectors that
// glue emoji sequences together.
constexpr std::array<Range, 16> kEmoji{{
    {0x200D, 0x200D},
    {0x20E3, 0x20E3},
    {0x2300, 0x23FF},
    {0x2600, 0x27BF},
    {0x2B00, 0x2BFF},
    {0x3030, 0x3030},
    {0x303D, 0x303D},
    {0x3297, 0x3299},
    {0xFE00, 0xFE0F},
    {0x1F000, 0x1F0FF},
    {0x1F100, 0x1F1FF},
    {0x1F200, 0x1F2FF},
    {0x1F300, 0x1F64F},
    {0x1F680, 0x1F6FF},
    {0x1F780, 0x1FAFF},
    {0xE0020, 0xE007F},
}};

// Non-ASCII code points that are not word characters: controls, Latin-1 and
// general punctuation, Arabic punctuation, symbol and arrow blocks, CJK
// punctuation, specials.
constexpr std::array<Range, 27> kNonWord{{
    {0x0080, 0x00BF},
    {0x00D7, 0x00D7},
    {0x00F7, 0x00F7},
    {0x037E, 0x037E},
    {0x0387, 0x0387},
    {0x055A, 0x055F},
    {0x0589, 0x058A},
    {0x0600, 0x060F},
    {0x061B, 0x061F},
    {0x066A, 0x066D},
    {0x06D4, 0x06D4},
    {0x06DD, 0x06DE},
    {0x06E9, 0x06E9},
    {0x06FD, 0x06FE},
    {0x2000, 0x206F},
    {0x20A0, 0x20CF},
    {0x20D0, 0x20FF},
    {0x2100, 0x2BFF},
    {0x2E00, 0x2E7F},
    {0x3000, 0x303F},
    {0xD800, 0xDFFF},
    {0xE000, 0xF8FF},
    {0xFD3E, 0xFD3F},
    {0xFE00, 0xFE6F},
    {0xFF00, 0xFF0F},
    {0xFFF0, 0xFFFF},
    {0x1F000, 0x1FFFF},
}};

}  // namespace

std::vector<CodeUnit> decode(std::string_view text) {
  std::vector<CodeUnit> out;
  out.reserve(text.size());
  const auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(text[i]); };
  std::size_t i = 0;
  while (i < text.size()) {
    const std::uint8_t lead = byte(i);
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
      min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
      min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
      min = 0x10000;
    }
    bool valid = len != 0 && i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const std::uint8_t cont = byte(i + k);
      if ((cont & 0xC0) != 0x80) valid = false;
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (valid && len > 1 &&
        (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) {
      valid = false;
    }
    if (!valid) {
      out.push_back({0xFFFD, i, 1, false});
      ++i;
      continue;
    }
    out.push_back({cp, i, len, true});
    i += len;
  }
  return out;
}

bool is_whitespace(char32_t cp) noexcept { return in_ranges(cp, kSpaces); }

bool is_emoji(char32_t cp) noexcept { return in_ranges(cp, kEmoji); }

bool is_word(char32_t cp) noexcept {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= 'a' && cp <= 'z') || cp == '_';
  }
  if (cp > 0x10FFFF) return false;
  return !in_ranges(cp, kNonWord) && !in_ranges(cp, kEmoji) &&
         !in_ranges(cp, kSpaces);
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace mltc::unicode
