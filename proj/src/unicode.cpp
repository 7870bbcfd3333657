#include "lexforge/unicode.hpp"

#include <algorithm>
#include <array>

#include "lexforge/common.hpp"

namespace lexforge::uni {

namespace {

struct Range {
    char32_t lo, hi;
};

constexpr Range kDigits[] = {
    {0x0030, 0x0039}, {0x0660, 0x0669}, {0x06F0, 0x06F9}, {0x07C0, 0x07C9},
    {0x0966, 0x096F}, {0x09E6, 0x09EF}, {0x0A66, 0x0A6F}, {0x0AE6, 0x0AEF},
    {0x0B66, 0x0B6F}, {0x0BE6, 0x0BEF}, {0x0C66, 0x0C6F}, {0x0CE6, 0x0CEF},
    {0x0D66, 0x0D6F}, {0x0DE6, 0x0DEF}, {0x0E50, 0x0E59}, {0x0ED0, 0x0ED9},
    {0x0F20, 0x0F29}, {0x1040, 0x1049}, {0x1090, 0x1099}, {0x17E0, 0x17E9},
    {0x1810, 0x1819}, {0xA8D0, 0xA8D9}, {0xA9D0, 0xA9D9}, {0xFF10, 0xFF19},
};

struct ScriptRange {
    char32_t lo, hi;
    Script script;
};

// Sorted by lo. Letter blocks only; digits and punctuation inside these
// blocks are caught by is_digit / is_punctuation before script lookup
// where the distinction matters.
constexpr ScriptRange kScripts[] = {
    {0x0041, 0x005A, Script::Latin},    {0x0061, 0x007A, Script::Latin},
    {0x00C0, 0x00D6, Script::Latin},    {0x00D8, 0x00F6, Script::Latin},
    {0x00F8, 0x024F, Script::Latin},    {0x0250, 0x02AF, Script::Latin},
    {0x0370, 0x0373, Script::Greek},    {0x0376, 0x0377, Script::Greek},
    {0x037B, 0x037D, Script::Greek},    {0x0386, 0x0386, Script::Greek},
    {0x0388, 0x03FF, Script::Greek},    {0x0400, 0x052F, Script::Cyrillic},
    {0x0531, 0x058F, Script::Armenian}, {0x0591, 0x05F4, Script::Hebrew},
    {0x0600, 0x06FF, Script::Arabic},   {0x0750, 0x077F, Script::Arabic},
    {0x0780, 0x07BF, Script::Thaana},   {0x07C0, 0x07FF, Script::Nko},
    {0x08A0, 0x08FF, Script::Arabic},   {0x0900, 0x097F, Script::Devanagari},
    {0x0980, 0x09FF, Script::Bengali},  {0x0A00, 0x0A7F, Script::Gurmukhi},
    {0x0A80, 0x0AFF, Script::Gujarati}, {0x0B00, 0x0B7F, Script::Oriya},
    {0x0B80, 0x0BFF, Script::Tamil},    {0x0C00, 0x0C7F, Script::Telugu},
    {0x0C80, 0x0CFF, Script::Kannada},  {0x0D00, 0x0D7F, Script::Malayalam},
    {0x0D80, 0x0DFF, Script::Sinhala},  {0x0E00, 0x0E7F, Script::Thai},
    {0x0E80, 0x0EFF, Script::Lao},      {0x0F00, 0x0FFF, Script::Tibetan},
    {0x1000, 0x109F, Script::Myanmar},  {0x10A0, 0x10FF, Script::Georgian},
    {0x1100, 0x11FF, Script::Hangul},   {0x1200, 0x139F, Script::Ethiopic},
    {0x13A0, 0x13FF, Script::Cherokee}, {0x1780, 0x17FF, Script::Khmer},
    {0x1800, 0x18AF, Script::Mongolian},{0x19E0, 0x19FF, Script::Khmer},
    {0x1C80, 0x1C88, Script::Cyrillic}, {0x1C90, 0x1CBF, Script::Georgian},
    {0x1E00, 0x1EFF, Script::Latin},    {0x1F00, 0x1FFF, Script::Greek},
    {0x2C60, 0x2C7F, Script::Latin},    {0x2D00, 0x2D2F, Script::Georgian},
    {0x2D80, 0x2DDF, Script::Ethiopic}, {0x2DE0, 0x2DFF, Script::Cyrillic},
    {0x2E80, 0x2EFF, Script::Han},      {0x3040, 0x309F, Script::Hiragana},
    {0x30A0, 0x30FF, Script::Katakana}, {0x3130, 0x318F, Script::Hangul},
    {0x31F0, 0x31FF, Script::Katakana}, {0x3400, 0x4DBF, Script::Han},
    {0x4E00, 0x9FFF, Script::Han},      {0xA640, 0xA69F, Script::Cyrillic},
    {0xA720, 0xA7FF, Script::Latin},    {0xA8E0, 0xA8FF, Script::Devanagari},
    {0xA960, 0xA97F, Script::Hangul},   {0xAB00, 0xAB2F, Script::Ethiopic},
    {0xAB30, 0xAB6F, Script::Latin},    {0xAC00, 0xD7AF, Script::Hangul},
    {0xF900, 0xFAFF, Script::Han},      {0xFB00, 0xFB06, Script::Latin},
    {0xFB50, 0xFDFF, Script::Arabic},   {0xFE70, 0xFEFF, Script::Arabic},
    {0xFF21, 0xFF3A, Script::Latin},    {0xFF41, 0xFF5A, Script::Latin},
    {0xFF66, 0xFF9D, Script::Katakana}, {0xFFA0, 0xFFDC, Script::Hangul},
    {0x20000, 0x2A6DF, Script::Han},
};

constexpr Range kPunct[] = {
    {0x0021, 0x002F}, {0x003A, 0x0040}, {0x005B, 0x0060}, {0x007B, 0x007E},
    {0x00A1, 0x00A1}, {0x00A7, 0x00A7}, {0x00AB, 0x00AB}, {0x00B6, 0x00B7},
    {0x00BB, 0x00BB}, {0x00BF, 0x00BF}, {0x037E, 0x037E}, {0x0387, 0x0387},
    {0x055A, 0x055F}, {0x0589, 0x058A}, {0x05BE, 0x05BE}, {0x05C0, 0x05C0},
    {0x05C3, 0x05C3}, {0x05C6, 0x05C6}, {0x05F3, 0x05F4}, {0x0609, 0x060A},
    {0x060C, 0x060D}, {0x061B, 0x061B}, {0x061E, 0x061F}, {0x066A, 0x066D},
    {0x06D4, 0x06D4}, {0x0700, 0x070D}, {0x0964, 0x0965}, {0x0DF4, 0x0DF4},
    {0x0E4F, 0x0E4F}, {0x0E5A, 0x0E5B}, {0x0F04, 0x0F12}, {0x104A, 0x104F},
    {0x10FB, 0x10FB}, {0x1360, 0x1368}, {0x17D4, 0x17DA}, {0x2010, 0x2027},
    {0x2030, 0x205E}, {0x3001, 0x3003}, {0x3008, 0x3011}, {0x3014, 0x301F},
    {0x30FB, 0x30FB}, {0xFE50, 0xFE6B}, {0xFF01, 0xFF0F}, {0xFF1A, 0xFF20},
    {0xFF3B, 0xFF40}, {0xFF5B, 0xFF65},
};

bool in_ranges(char32_t cp, const Range* table, std::size_t n) {
    auto it = std::upper_bound(table, table + n, cp,
                               [](char32_t v, const Range& r) { return v < r.lo; });
    return it != table && cp <= (it - 1)->hi;
}

} // namespace

const char* script_name(Script s) {
    static constexpr std::array<const char*, 33> names = {
        "Common", "Latin", "Greek", "Cyrillic", "Armenian", "Hebrew", "Arabic",
        "Thaana", "Nko", "Devanagari", "Bengali", "Gurmukhi", "Gujarati",
        "Oriya", "Tamil", "Telugu", "Kannada", "Malayalam", "Sinhala", "Thai",
        "Lao", "Tibetan", "Myanmar", "Georgian", "Hangul", "Ethiopic",
        "Cherokee", "Khmer", "Mongolian", "Hiragana", "Katakana", "Han",
        "Unknown"};
    return names[static_cast<std::size_t>(s)];
}

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        std::size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            throw DataError("invalid UTF-8 lead byte at offset " + std::to_string(i));
        }
        if (i + len > s.size()) throw DataError("truncated UTF-8 sequence");
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) throw DataError("invalid UTF-8 continuation byte");
            cp = (cp << 6) | (b & 0x3F);
        }
        static constexpr char32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            throw DataError("invalid UTF-8 code point");
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
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
    return out;
}

std::size_t codepoint_count(std::string_view s) {
    return decode_utf8(s).size();
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
        case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
        case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punctuation(char32_t cp) {
    return in_ranges(cp, kPunct, std::size(kPunct));
}

bool is_digit(char32_t cp) {
    return in_ranges(cp, kDigits, std::size(kDigits));
}

Script script_of(char32_t cp) {
    if (is_digit(cp) || is_punctuation(cp) || is_whitespace(cp)) return Script::Common;
    if (cp < 0x41) return Script::Common;
    auto it = std::upper_bound(std::begin(kScripts), std::end(kScripts), cp,
                               [](char32_t v, const ScriptRange& r) { return v < r.lo; });
    if (it != std::begin(kScripts) && cp <= (it - 1)->hi) return (it - 1)->script;
    if (cp < 0x80) return Script::Common; // remaining ASCII symbols
    return Script::Unknown;
}

bool is_latin(char32_t cp) {
    return script_of(cp) == Script::Latin;
}

Script majority_script(std::string_view s) {
    std::array<std::size_t, 33> counts{};
    for (char32_t cp : decode_utf8(s)) ++counts[static_cast<std::size_t>(script_of(cp))];

    std::size_t best = static_cast<std::size_t>(Script::Common);
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i == static_cast<std::size_t>(Script::Common)) continue;
        if (counts[i] > best_count) {
            best = i;
            best_count = counts[i];
        }
    }
    if (best_count == 0) return Script::Common;
    return static_cast<Script>(best);
}

} // namespace lexforge::uni
