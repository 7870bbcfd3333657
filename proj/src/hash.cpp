#include "lexforge/hash.hpp"

#include <fstream>
#include <sstream>

#include "lexforge/common.hpp"

namespace lexforge {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    const std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) out[15 - i] = digits[(h >> (4 * i)) & 0xF];
    return out;
}

std::string fnv1a64_hex_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open file for hashing: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return fnv1a64_hex(ss.str());
}

} // namespace lexforge
