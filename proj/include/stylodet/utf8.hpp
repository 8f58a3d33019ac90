#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace stylodet::utf8 {

struct Decoded {
  char32_t cp;
  std::size_t length;  // bytes consumed, >= 1
};

// Decodes the code point starting at `pos`. Invalid sequences decode as
// U+FFFD consuming one byte, so iteration always makes progress.
Decoded decode(std::string_view text, std::size_t pos);

void append(std::string& out, char32_t cp);

bool is_valid(std::string_view text);

bool is_space(char32_t cp);
bool is_ascii_alpha(char32_t cp);
bool is_digit(char32_t cp);
// Ideographs and kana: scripts written without inter-word spaces.
bool is_cjk(char32_t cp);
// Letter approximation without ICU: ASCII letters plus non-ASCII code points
// outside the known punctuation, symbol and space blocks.
bool is_letter(char32_t cp);
bool is_upper(char32_t cp);
bool is_punctuation(char32_t cp);

// ASCII-only lowercasing; other bytes are copied unchanged.
std::string ascii_lower(std::string_view text);

}  // namespace stylodet::utf8
