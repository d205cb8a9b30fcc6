#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "resolimit/psf.hpp"
#include "resolimit/trigpoly.hpp"

namespace resolimit {

struct Spike {
    double t = 0.0;                     // torus location in [-1/2, 1/2)
    std::complex<double> c{0.0, 0.0};   // nonzero amplitude
};

class SpikeMeasure {
public:
    SpikeMeasure() = default;
    explicit SpikeMeasure(std::vector<Spike> spikes);

    int S() const { return static_cast<int>(spikes_.size()); }
    bool empty() const { return spikes_.empty(); }
    const std::vector<Spike>& spikes() const { return spikes_; }
    const Spike& spike(int s) const { return spikes_[static_cast<size_t>(s)]; }

    double min_separation() const;  // wrap-around, +inf for S < 2
    double total_variation() const;

private:
    std::vector<Spike> spikes_;
};

// Two spikes at -Delta/2 and +Delta/2 carrying amplitudes e^{-i theta/2} and
// e^{+i theta/2}.
SpikeMeasure canonical_measure(double delta, double theta);

std::vector<std::complex<double>> forward(const SpikeMeasure& mu, const GainVector& g);
TrigPolynomial adjoint(const std::vector<std::complex<double>>& p, const GainVector& g);

struct Observation {
    std::vector<std::complex<double>> z;  // noisy samples
    std::vector<std::complex<double>> x;  // clean samples when known
    std::vector<std::complex<double>> w;  // noise when known
    double eta = 0.0;                     // realized noise norm
    bool has_clean = false;
    GainVector gain;
};

// Complex white Gaussian noise calibrated so that the expected noise energy
// matches 20 log10(|x|/|w|) = snr_db; infinite snr_db means noiseless.
Observation add_noise(const std::vector<std::complex<double>>& x, const GainVector& g,
                      double snr_db, std::uint64_t seed);

Observation observe(const SpikeMeasure& mu, const GainVector& g, double snr_db,
                    std::uint64_t seed);

}  // namespace resolimit
