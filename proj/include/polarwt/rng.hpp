#pragma once

#include <cstdint>

namespace polarwt {

// Deterministic splitmix64 generator. Used everywhere instead of std::
// distributions so that results are reproducible across platforms and
// independent of how trials are partitioned over threads.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    uint8_t next_bit() { return static_cast<uint8_t>(next_u64() >> 63); }

    bool bernoulli(double p) { return next_double() < p; }

private:
    uint64_t state_;
};

// Independent stream derived from (seed, a, b). Each simulation trial gets its
// own streams so aggregation order cannot change results.
inline Rng derive_rng(uint64_t seed, uint64_t a, uint64_t b = 0) {
    Rng mixer(seed);
    uint64_t s = mixer.next_u64();
    s ^= 0x9e3779b97f4a7c15ULL * (a + 1);
    Rng mixer2(s);
    uint64_t s2 = mixer2.next_u64() ^ (0xbf58476d1ce4e5b9ULL * (b + 1));
    return Rng(s2);
}

}  // namespace polarwt
