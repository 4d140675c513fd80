#pragma once

#include <string>
#include <string_view>

// Small UTF-8 and string helpers shared by the parsers.
namespace kgod::text {

// Replaces every malformed UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

// Decodes the code point starting at s[pos]; advances pos. Assumes valid UTF-8.
char32_t decode_utf8(std::string_view s, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);

// Simple (one-to-one, locale independent) case mappings. Covers Latin,
// Greek, Cyrillic and Armenian; other scripts map to themselves.
char32_t simple_upper(char32_t cp);
char32_t simple_lower(char32_t cp);
bool is_upper(char32_t cp);
bool is_letter(char32_t cp);

// Uppercases the first code point of s.
std::string upper_first(std::string_view s);

bool is_space(char c);
std::string_view trim(std::string_view s);
// Trims, and turns every run of whitespace into a single space.
std::string collapse_whitespace(std::string_view s);

bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

std::string percent_decode(std::string_view s);

}  // namespace kgod::text
