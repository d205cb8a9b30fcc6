#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace resolimit {

// splitmix64 generator. Chosen over <random> engines because the whole
// stream, including the Box-Muller normals below, is bit-reproducible
// across standard libraries and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 significant bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    // Complex normal with E|z|^2 = 1.
    std::complex<double> cnormal() {
        const double re = normal();
        const double im = normal();
        return {re * M_SQRT1_2, im * M_SQRT1_2};
    }

private:
    uint64_t s_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Deterministic seed derivation for (stream a, substream b) of a base seed;
// used for per-trial RNGs so parallel and serial sweeps agree exactly.
inline uint64_t seed_chain(uint64_t base, uint64_t a, uint64_t b) {
    Rng r(base);
    r.next_u64();
    Rng ra(r.next_u64() ^ (a * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL));
    Rng rb(ra.next_u64() ^ (b * 0xc2b2ae3d27d4eb4fULL + 0x27d4eb2f165667c5ULL));
    return rb.next_u64();
}

}  // namespace resolimit
