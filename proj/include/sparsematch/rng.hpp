#pragma once

#include <cstdint>

namespace sparsematch {

// splitmix64: small, fast, and identical output on every platform, which the
// reproducibility contract (same seed -> byte-identical plans and files)
// relies on. std::mt19937 distributions are implementation-defined, so we
// avoid them for anything that ends up persisted.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased draw from [0, bound) via rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~0ull - (~0ull % bound + 1) % bound;
        std::uint64_t v;
        do {
            v = next();
        } while (v > limit);
        return v % bound;
    }

    // Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Stable seed derivation for sub-streams (per block, per trial, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 mix(master ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull));
    mix.next();
    return mix.next();
}

} // namespace sparsematch
