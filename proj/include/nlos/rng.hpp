#pragma once

#include <cmath>
#include <cstdint>

namespace nlos {

// splitmix64 step; also used as a mixing function for stream keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL);
    return splitmix64(s);
}

// Small counter-based generator. Streams keyed by (seed, stream) are
// independent of iteration order, so draws keyed per element give
// results that do not depend on worker count.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(mix_key(seed, stream)) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Box-Muller; implemented directly so sequences are stable across
    // standard libraries.
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(next_double() * static_cast<double>(n)) % n;
    }

  private:
    std::uint64_t state_;
};

// Poisson sampler: inversion by sequential search below lambda = 10,
// rounded normal approximation clamped at zero above.
inline std::int64_t poisson_sample(double lambda, Rng& rng) {
    if (lambda <= 0.0) return 0;
    if (lambda < 10.0) {
        const double u = rng.next_double();
        double p = std::exp(-lambda);
        double cdf = p;
        std::int64_t k = 0;
        const std::int64_t cap = static_cast<std::int64_t>(10.0 * lambda) + 100;
        while (u > cdf && k < cap) {
            ++k;
            p *= lambda / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    const long long x = std::llround(lambda + std::sqrt(lambda) * rng.normal());
    return x < 0 ? 0 : static_cast<std::int64_t>(x);
}

} // namespace nlos
