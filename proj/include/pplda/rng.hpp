#ifndef PPLDA_RNG_HPP
#define PPLDA_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pplda {

// Splittable counter-seeded generator with documented substreams.
//
// Stream layout: Rng(seed, stream) runs xoshiro256++ whose state is filled
// from a SplitMix64 chain started at mix64(seed) ^ mix64(stream * GOLDEN).
// Distinct (seed, stream) pairs give statistically independent sequences,
// so replicate r of an experiment with seed s simply uses Rng(s, r) and
// results do not depend on which worker thread runs the replicate.
//
// Gaussian variates use Box-Muller on the top 53 bits (no inverse CDF, no
// libstdc++ distribution objects), so sequences are identical across
// standard libraries and platforms.

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t sm = detail::mix64(seed) ^
                           detail::mix64(stream * 0x9e3779b97f4a7c15ULL + 1);
        for (auto& word : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            word = detail::mix64(sm);
        }
        // All-zero state is invalid for xoshiro; mix64 output of a moving
        // counter cannot produce four zero words, but guard anyway.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal variate (Box-Muller, second value cached).
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - next_double(); // (0, 1], keeps log finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

  private:
    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace pplda

#endif
