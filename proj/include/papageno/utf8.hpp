#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace papageno::utf8 {

// Invalid byte sequences decode to U+FFFD, one per offending byte.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
void append(std::string& out, char32_t cp);

char32_t to_lower(char32_t cp);
bool is_upper(char32_t cp);
std::string to_lower(std::string_view s);

bool is_space(char32_t cp);
bool is_digit(char32_t cp);
bool is_pictographic(char32_t cp);
// Code points that ride along with a preceding pictograph: variation
// selectors, skin-tone modifiers, ZWJ, keycap, tag characters.
bool is_emoji_component(char32_t cp);
bool is_punctuation(char32_t cp);
// Letters, digits, underscore, and any other non-space code point that is
// neither punctuation nor pictographic.
bool is_word(char32_t cp);

// Lowercases and collapses every whitespace run to one ASCII space; trims.
std::string fold(std::string_view s);

}  // namespace papageno::utf8
