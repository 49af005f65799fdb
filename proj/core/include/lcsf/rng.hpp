#pragma once

#include <cstdint>
#include <string_view>

namespace lcsf {

/// Seedable, portable PRNG (splitmix64). Produces identical sequences on
/// every platform, which std::uniform_real_distribution does not guarantee.
/// State is owned by the caller and never shared between threads.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

private:
    std::uint64_t state_;
};

/// Derives a child seed from (master seed, index, stage tag). Each pipeline
/// stage of each realization draws from its own derived stream, so deleting a
/// realization and re-running it with the same master seed reproduces it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::string_view tag) {
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(master ^ 0xA0761D6478BD642Full);
    h = mix(h ^ (index + 1) * 0x9E3779B97F4A7C15ull);
    for (unsigned char c : tag)
        h = mix((h ^ c) * 0x100000001B3ull);
    return h;
}

} // namespace lcsf
