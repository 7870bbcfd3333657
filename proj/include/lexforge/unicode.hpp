#ifndef LEXFORGE_UNICODE_HPP
#define LEXFORGE_UNICODE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexforge::uni {

// Script classes used by the overlap grouping and the cluster script
// report. Common covers digits, punctuation, symbols and spaces. The
// range tables cover the scripts of the languages this tool is aimed at
// (full Unicode property data is deliberately not vendored); anything
// outside them classifies as Unknown.
enum class Script : std::uint8_t {
    Common, Latin, Greek, Cyrillic, Armenian, Hebrew, Arabic, Thaana, Nko,
    Devanagari, Bengali, Gurmukhi, Gujarati, Oriya, Tamil, Telugu, Kannada,
    Malayalam, Sinhala, Thai, Lao, Tibetan, Myanmar, Georgian, Hangul,
    Ethiopic, Cherokee, Khmer, Mongolian, Hiragana, Katakana, Han, Unknown,
};

const char* script_name(Script s);

// Decodes UTF-8 into code points; throws DataError on malformed input.
std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(const std::vector<char32_t>& cps);
// Number of code points in a valid UTF-8 string.
std::size_t codepoint_count(std::string_view s);

bool is_whitespace(char32_t cp);
// Approximates Unicode general category P (plus ASCII symbol characters,
// matching common WordPiece pre-tokenisers).
bool is_punctuation(char32_t cp);
// Unicode decimal digits (category Nd) across the covered scripts.
bool is_digit(char32_t cp);

Script script_of(char32_t cp);
bool is_latin(char32_t cp);

// Majority script over a string's code points, ignoring Common ones
// unless the string has nothing else. Ties break toward the script with
// the lower enum value.
Script majority_script(std::string_view s);

} // namespace lexforge::uni

#endif
