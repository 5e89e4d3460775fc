#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace lotmatch {

// SplitMix64 is the project's portable seedable generator. Every data layer
// draws from its own stream derived from (seed, label), so generating layers
// in a different order cannot change any layer's content. The seed->output
// mapping is stable within a release.
struct SplitMix64 {
    uint64_t state = 0;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // Unbiased integer in [0, n) by rejection.
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= lim);
        return v % n;
    }

    // Box-Muller, one variate per call (the sine branch is discarded to keep
    // call sequences independent of history).
    double normal() {
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Knuth's product method for small means, normal approximation above.
    int64_t poisson(double lambda) {
        if (!(lambda > 0.0)) return 0;
        if (lambda > 1000.0) {
            double v = std::floor(lambda + std::sqrt(lambda) * normal() + 0.5);
            return v < 0.0 ? 0 : static_cast<int64_t>(v);
        }
        const double limit = std::exp(-lambda);
        int64_t k = 0;
        double prod = next_double();
        while (prod > limit) {
            ++k;
            prod *= next_double();
        }
        return k;
    }
};

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// Independent stream for one purpose; a warm-up step decorrelates small seeds.
inline SplitMix64 rng_stream(uint64_t seed, std::string_view label) {
    SplitMix64 g(seed ^ fnv1a64(label));
    g.next_u64();
    return g;
}

}  // namespace lotmatch
