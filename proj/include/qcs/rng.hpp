// Seedable, splittable deterministic RNG. Every stochastic operation in the
// simulator takes an RngStream explicitly; substreams are derived from the
// master seed by name or index, so runs are bit-reproducible and independent
// Monte-Carlo workers can own disjoint streams.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace qcs {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace detail

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(detail::splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    // Derived streams depend only on (seed, name/index), never on how much
    // of the parent stream has been consumed.
    RngStream substream(std::string_view name) const {
        return RngStream(detail::splitmix64(seed_ ^ detail::fnv1a64(name)));
    }
    RngStream substream(std::uint64_t index) const {
        return RngStream(detail::splitmix64(seed_ ^ detail::splitmix64(index + 0x51ED270B)));
    }

    std::uint64_t bits() { return gen_(); }

    // Uniform double in [0, 1) with 53 random bits. Hand-rolled instead of
    // std::uniform_real_distribution, whose output is implementation-defined.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller (used by test helpers and random-state
    // generation; one value per call, second value discarded for simplicity).
    double normal() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace qcs
