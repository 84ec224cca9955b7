#pragma once

#include <cmath>
#include <cstdint>

namespace bezierflow {

// splitmix64, used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Named per-purpose streams so experiments stay reproducible when one
// consumer changes how many draws it makes.
namespace stream {
inline constexpr std::uint64_t sample_pi0 = 1;
inline constexpr std::uint64_t sample_pi1 = 2;
inline constexpr std::uint64_t pairing = 3;
inline constexpr std::uint64_t init = 4;
inline constexpr std::uint64_t minibatch = 5;
inline constexpr std::uint64_t time_draws = 6;
inline constexpr std::uint64_t eval_pi0 = 7;
inline constexpr std::uint64_t eval_pi1 = 8;
inline constexpr std::uint64_t reflow_pi0 = 9;
} // namespace stream

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream_id) {
    std::uint64_t s = root ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1));
    splitmix64(s);
    return splitmix64(s);
}

// xoshiro256** with splitmix64 seeding. Portable: the integer stream is
// identical on every platform; floating-point draws depend only on IEEE
// arithmetic plus sqrt/log.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    static Rng stream(std::uint64_t root, std::uint64_t stream_id) {
        return Rng(derive_seed(root, stream_id));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return r % n;
    }

    // Standard normal via Marsaglia polar Box-Muller; the spare is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bezierflow
