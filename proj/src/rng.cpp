#include "lexforge/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lexforge {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// FNV-1a, used only to fold split labels into the state.
std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace

std::uint64_t Rng::next_u64() {
    state_ += kGolden;
    return mix(state_);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal(double mean, double stddev) {
    double u1 = uniform_open();
    double u2 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t threshold = -n % n; // 2^64 mod n
    for (;;) {
        std::uint64_t v = next_u64();
        if (v >= threshold) return v % n;
    }
}

Rng Rng::split(std::uint64_t stream) const {
    return Rng(mix(state_ ^ mix(stream + kGolden)));
}

Rng Rng::split(std::string_view label) const {
    return Rng(mix(state_ ^ fnv1a(label)));
}

Rng Rng::split(std::string_view label, std::uint64_t stream) const {
    return split(label).split(stream);
}

} // namespace lexforge
