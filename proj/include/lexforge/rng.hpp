#ifndef LEXFORGE_RNG_HPP
#define LEXFORGE_RNG_HPP

#include <cstdint>
#include <string_view>

namespace lexforge {

// Deterministic splittable PRNG built on SplitMix64 (Steele, Lea & Flood).
// The state advances by the golden-ratio increment and each output is a
// fixed 64-bit finalizer of the state, so the stream is a pure function
// of the seed: identical seeds give identical streams on every platform.
//
// split() derives an independent child stream by hashing the current
// state together with a caller-chosen label; it does not advance the
// parent. This is how composite operations (KMeans in a pipeline,
// per-cluster fits, per-row initializers) get stable sub-streams that do
// not depend on how many draws their siblings consumed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

    // Uniform in [0, 1), 53 random bits.
    double uniform();
    // Uniform in (0, 1); safe to feed into log().
    double uniform_open();
    // Standard normal via Box-Muller, scaled. Consumes two draws.
    double normal(double mean = 0.0, double stddev = 1.0);
    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n);

    Rng split(std::uint64_t stream) const;
    Rng split(std::string_view label) const;
    Rng split(std::string_view label, std::uint64_t stream) const;

private:
    std::uint64_t state_;
};

} // namespace lexforge

#endif
