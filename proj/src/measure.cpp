#include "resolimit/measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "resolimit/rng.hpp"

namespace resolimit {

SpikeMeasure::SpikeMeasure(std::vector<Spike> spikes) : spikes_(std::move(spikes)) {
    for (auto& s : spikes_) {
        if (std::abs(s.c) == 0.0)
            throw std::invalid_argument("spike measure: zero amplitude");
        s.t = wrap_torus(s.t);
    }
    for (size_t i = 0; i < spikes_.size(); ++i)
        for (size_t j = i + 1; j < spikes_.size(); ++j)
            if (wrap_dist(spikes_[i].t, spikes_[j].t) == 0.0)
                throw std::invalid_argument("spike measure: coincident locations");
}

double SpikeMeasure::min_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < spikes_.size(); ++i)
        for (size_t j = i + 1; j < spikes_.size(); ++j)
            best = std::min(best, wrap_dist(spikes_[i].t, spikes_[j].t));
    return best;
}

double SpikeMeasure::total_variation() const {
    double acc = 0.0;
    for (const auto& s : spikes_) acc += std::abs(s.c);
    return acc;
}

SpikeMeasure canonical_measure(double delta, double theta) {
    if (!(delta > 0.0) || delta > 0.5)
        throw std::invalid_argument("canonical measure: delta must lie in (0, 1/2]");
    if (theta < 0.0 || theta > M_PI)
        throw std::invalid_argument("canonical measure: theta must lie in [0, pi]");
    std::vector<Spike> sp(2);
    sp[0].t = -0.5 * delta;
    sp[0].c = std::polar(1.0, -0.5 * theta);
    sp[1].t = 0.5 * delta;
    sp[1].c = std::polar(1.0, 0.5 * theta);
    return SpikeMeasure(std::move(sp));
}

std::vector<std::complex<double>> forward(const SpikeMeasure& mu, const GainVector& g) {
    const int n = g.n();
    std::vector<std::complex<double>> x(static_cast<size_t>(g.N));
    for (int k = -n; k <= n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (const auto& s : mu.spikes())
            acc += s.c * std::polar(1.0, -2.0 * M_PI * k * s.t);
        x[static_cast<size_t>(k + n)] = g.at(k) * acc;
    }
    return x;
}

TrigPolynomial adjoint(const std::vector<std::complex<double>>& p, const GainVector& g) {
    if (p.size() != static_cast<size_t>(g.N))
        throw std::invalid_argument("adjoint: vector length does not match gain");
    std::vector<std::complex<double>> q(p.size());
    for (size_t i = 0; i < p.size(); ++i) q[i] = g.g[i] * p[i];  // gains are real
    return TrigPolynomial(std::move(q));
}

Observation add_noise(const std::vector<std::complex<double>>& x, const GainVector& g,
                      double snr_db, std::uint64_t seed) {
    if (x.size() != static_cast<size_t>(g.N))
        throw std::invalid_argument("add_noise: vector length does not match gain");
    double energy = 0.0;
    for (const auto& v : x) energy += std::norm(v);
    Observation obs;
    obs.gain = g;
    obs.x = x;
    obs.has_clean = true;
    obs.w.assign(x.size(), std::complex<double>(0.0, 0.0));
    obs.z = x;
    if (std::isinf(snr_db) && snr_db > 0.0) {
        obs.eta = 0.0;
        return obs;
    }
    if (!(energy > 0.0))
        throw std::invalid_argument("add_noise: zero signal, SNR undefined");
    if (!std::isfinite(snr_db))
        throw std::invalid_argument("add_noise: SNR must be finite or +inf");
    const double noise_energy = energy * std::pow(10.0, -snr_db / 10.0);
    const double sigma = std::sqrt(noise_energy / static_cast<double>(x.size()));
    Rng rng(seed);
    double realized = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        obs.w[i] = sigma * rng.cnormal();
        obs.z[i] = x[i] + obs.w[i];
        realized += std::norm(obs.w[i]);
    }
    obs.eta = std::sqrt(realized);
    return obs;
}

Observation observe(const SpikeMeasure& mu, const GainVector& g, double snr_db,
                    std::uint64_t seed) {
    return add_noise(forward(mu, g), g, snr_db, seed);
}

}  // namespace resolimit
