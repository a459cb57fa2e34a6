#pragma once

#include <cstdint>
#include <vector>

namespace navbench {

// splitmix64; used to derive independent stream seeds from (seed, index...) keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) {
    return splitmix64(seed ^ splitmix64(a + 0x51ED2701ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
    return derive_seed(derive_seed(seed, a, b), c);
}

// Deterministic PRNG with fixed sampling algorithms: xorshift64* state plus
// our own bounded/real draws, so sequences do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(splitmix64(seed)) {
        if (s_ == 0) s_ = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next_u64() {
        // xorshift64*; small, fast, and fully specified here.
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545F4914F6CDD1DULL;
    }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    int int_in(int lo, int hi) { // inclusive range [lo, hi]
        return lo + static_cast<int>(bounded(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double real_in(double lo, double hi) { return lo + (hi - lo) * real01(); }

    bool chance(double p) { return real01() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(bounded(v.size()))];
    }

private:
    std::uint64_t s_;
};

} // namespace navbench
