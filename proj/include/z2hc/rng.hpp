#pragma once

#include <cstdint>
#include <random>

namespace z2hc {

// splitmix64: used to derive independent stream seeds from (master seed, index)
// so per-sample streams never overlap regardless of how work is scheduled.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ 0x6a09e667f3bcc909ULL ^ stream * 0x9e3779b97f4a7c15ULL);
}

// Deterministic RNG wrapper. The engine is std::mt19937_64, whose output
// sequence is pinned by the standard; the distribution transforms live here
// because the std distributions are implementation-defined and would break
// cross-platform reproducibility of sampled results.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, bound) by rejection; bound = 0 means the full 64-bit range.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) return eng_();
        std::uint64_t threshold = -bound % bound; // 2^64 mod bound
        for (;;) {
            std::uint64_t r = eng_();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform integer in [lo, hi] inclusive.
    std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
        return lo + next_below(hi - lo + 1);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

} // namespace z2hc
