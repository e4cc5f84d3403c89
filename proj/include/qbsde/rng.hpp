#ifndef QBSDE_RNG_HPP
#define QBSDE_RNG_HPP

#include <cstdint>

namespace qbsde {

/// 64-bit finalizer used as the mixing core of the counter-based generator.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stateless keyed hash of a counter tuple. A draw depends only on the key
/// and the indices, never on how many other draws were made.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                  std::uint64_t c) {
    std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

/// Uniform draw in the open interval (0,1) from 64 random bits.
inline double uniform_open01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse of the standard normal CDF (Wichura's PPND16 rational
/// approximations, relative error below 1e-15 on (0,1)).
double inv_normal_cdf(double p);

/// Small sequential helper for test-style sampling; deterministic for a
/// fixed seed, based on the same mixing core.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_bits() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    double uniform() { return uniform_open01(next_bits()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return inv_normal_cdf(uniform()); }

private:
    std::uint64_t state_;
};

} // namespace qbsde

#endif
