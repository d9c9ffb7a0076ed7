#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nner {

// Minimal UTF-8 handling. All character offsets in this library are
// code-point offsets, not byte offsets; Vietnamese text is multi-byte
// almost everywhere so the distinction matters.

/// Decodes the code point starting at byte `i`; advances `i` past it.
/// Invalid bytes are consumed one at a time and returned verbatim so that
/// offsets stay monotone on malformed input.
inline char32_t utf8_next(std::string_view s, size_t& i) {
  unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + len > s.size()) {
    ++i;
    return b0;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char bk = static_cast<unsigned char>(s[i + k]);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  return cp;
}

inline void utf8_append(std::string& out, char32_t cp) {
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

inline std::vector<char32_t> utf8_decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) out.push_back(utf8_next(s, i));
  return out;
}

inline std::string utf8_encode(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) utf8_append(out, cp);
  return out;
}

inline size_t utf8_length(std::string_view s) {
  size_t i = 0, n = 0;
  while (i < s.size()) {
    utf8_next(s, i);
    ++n;
  }
  return n;
}

// Character classification for the Latin ranges Vietnamese orthography
// uses: ASCII, Latin-1 Supplement, Latin Extended-A, the horn letters
// (U+01A0..U+01B0), and Latin Extended Additional (U+1E00..U+1EFF).
// Anything outside these ranges is classified as "other".

inline bool is_upper_cp(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return true;  // À..Þ minus ×
  if (c >= 0x100 && c <= 0x137) return (c % 2) == 0;     // Ā..Ķķ pairs
  if (c >= 0x139 && c <= 0x148) return (c % 2) == 1;     // Ĺ..ň pairs
  if (c >= 0x14A && c <= 0x177) return (c % 2) == 0;     // Ŋ..ŷ pairs
  if (c == 0x178) return true;                           // Ÿ
  if (c >= 0x179 && c <= 0x17E) return (c % 2) == 1;     // Ź..ž pairs
  if (c == 0x1A0 || c == 0x1AF) return true;             // Ơ Ư
  if (c >= 0x1E00 && c <= 0x1EFF) {
    if (c >= 0x1E96 && c <= 0x1E9D) return false;  // unpaired lowercase block
    if (c == 0x1E9E) return true;                  // ẞ
    if (c == 0x1E9F) return false;
    return (c % 2) == 0;
  }
  return false;
}

inline bool is_lower_cp(char32_t c) {
  if (c >= U'a' && c <= U'z') return true;
  if (c == 0xDF) return true;  // ß
  if (c >= 0xE0 && c <= 0xFF && c != 0xF7) return true;
  if (c >= 0x100 && c <= 0x137) return (c % 2) == 1;
  if (c == 0x138) return true;  // ĸ
  if (c >= 0x139 && c <= 0x148) return (c % 2) == 0;
  if (c == 0x149) return true;
  if (c >= 0x14A && c <= 0x177) return (c % 2) == 1;
  if (c >= 0x179 && c <= 0x17E) return (c % 2) == 0;
  if (c == 0x17F) return true;  // ſ
  if (c == 0x1A1 || c == 0x1B0) return true;  // ơ ư
  if (c >= 0x1E00 && c <= 0x1EFF) {
    if (c >= 0x1E96 && c <= 0x1E9D) return true;
    if (c == 0x1E9E) return false;
    if (c == 0x1E9F) return true;
    return (c % 2) == 1;
  }
  return false;
}

inline bool is_digit_cp(char32_t c) { return c >= U'0' && c <= U'9'; }

inline char32_t to_lower_cp(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if (c == 0x178) return 0xFF;   // Ÿ -> ÿ
  if (c == 0x1E9E) return 0xDF;  // ẞ -> ß
  if (c == 0x1A0 || c == 0x1AF) return c + 1;
  if (is_upper_cp(c)) return c + 1;  // remaining ranges pair upper/lower
  return c;
}

inline std::string utf8_to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) utf8_append(out, to_lower_cp(utf8_next(s, i)));
  return out;
}

}  // namespace nner
