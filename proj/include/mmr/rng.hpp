#pragma once

#include <cstdint>

namespace mmr {

// Identifier written into generated file headers so suites can be
// reproduced across platforms.
inline constexpr const char* kPrngId = "splitmix64";

// Counter-based splitmix64 generator (Steele, Lea, Flood 2014).
// Every call advances the state by a fixed odd constant and mixes it,
// so the stream is a pure function of (seed, call index).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) {
        return a + (b - a) * uniform();
    }

    // Uniform integer in [0, n), n > 0. Lemire's multiply-shift without
    // rejection; the bias is < 2^-64 and the mapping is deterministic.
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Uniform integer in the inclusive range [lo, hi].
    std::int64_t uniform_range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    SplitMix64 g(base ^ (0xA0761D6478BD642FULL * (tag + 1)));
    return g.next();
}

}  // namespace mmr
