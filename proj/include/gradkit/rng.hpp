#ifndef GRADKIT_RNG_HPP
#define GRADKIT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace gradkit {

// splitmix64 finalizer; used to derive independent substream seeds from
// (seed, index) pairs so simulations are reproducible regardless of how the
// work is partitioned.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. The engine is the standardized mt19937_64;
// all distributions are generated here rather than with std:: distributions,
// whose output is implementation-defined.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    RandomStream(std::uint64_t seed, std::uint64_t index) : engine_(mix_seed(seed, index)) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via polar Box-Muller; caches the spare deviate.
    double gauss() {
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

    // Binomial by direct Bernoulli counting; exact and portable.
    long binomial(long trials, double p) {
        if (p <= 0.0) return 0;
        if (p >= 1.0) return trials;
        long k = 0;
        for (long i = 0; i < trials; ++i)
            if (uniform() < p) ++k;
        return k;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gradkit

#endif
