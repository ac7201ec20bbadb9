#ifndef PKIFLOW_RNG_HPP
#define PKIFLOW_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace pkiflow {

// Deterministic random helpers. std::mt19937_64 is a fixed algorithm, but the
// std::*_distribution adaptors are implementation-defined, so every draw here
// is built directly from raw engine output. Reports produced with the same
// seed are then identical across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double next_double() { return (engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), unbiased via rejection.
    size_t next_index(size_t n) {
        uint64_t bound = static_cast<uint64_t>(n);
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<size_t>(x % bound);
    }

    // Standard normal via Box-Muller (cosine branch only).
    double next_normal() {
        double u1 = ((engine_() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        double u2 = (engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64 mix of (seed, salt), for sub-streams that are not part of a
// documented additive scheme (e.g. the per-class split shuffles).
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace pkiflow

#endif
