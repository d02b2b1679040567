#ifndef SQUATS_RNG_HPP
#define SQUATS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace squats {

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derives a child seed from a parent seed and a stream path, so that every
// trial / codebook / noise source gets its own independent stream.
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = seed;
    (void)splitmix64(s);
    s ^= a;
    (void)splitmix64(s);
    s ^= b;
    (void)splitmix64(s);
    s ^= c;
    return splitmix64(s);
}

// Deterministic random source. The mt19937_64 engine output is pinned by the
// standard; the samplers below avoid std::*_distribution, whose output is
// implementation-defined, so the same seed gives the same stream everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t u64() { return eng_(); }

    // Uniform on [0, 1), 53 bits of precision.
    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; one spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Unbiased uniform integer in [0, bound).
    uint64_t below(uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x = u64();
        while (x >= limit) x = u64();
        return x % bound;
    }

    // k distinct indices from [0, n), returned sorted.
    std::vector<uint32_t> sample_indices(uint32_t n, uint32_t k) {
        if (k > n) throw std::invalid_argument("Rng::sample_indices: k > n");
        std::vector<uint32_t> pool(n);
        for (uint32_t i = 0; i < n; ++i) pool[i] = i;
        for (uint32_t i = 0; i < k; ++i) {
            const uint64_t j = i + below(n - i);
            std::swap(pool[i], pool[j]);
        }
        std::vector<uint32_t> out(pool.begin(), pool.begin() + k);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace squats

#endif
