#ifndef LEXFORGE_HASH_HPP
#define LEXFORGE_HASH_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace lexforge {

// FNV-1a 64-bit; used for content fingerprints in manifests and model
// metadata (not for security).
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
std::string fnv1a64_hex_file(const std::string& path);

} // namespace lexforge

#endif
