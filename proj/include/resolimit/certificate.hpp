#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "resolimit/autocorr.hpp"
#include "resolimit/measure.hpp"
#include "resolimit/trigpoly.hpp"

namespace resolimit {

// The two decoupled 2x2 systems fixing the even and odd parts of the
// vanishing-derivative interpolant for a canonical spike pair.
struct VanishingDerivativeSystem {
    double delta = 0.0, theta = 0.0;
    std::array<std::array<double, 2>, 2> M_R{}, M_S{};
    double alpha_R = 0.0, beta_R = 0.0;
    double alpha_S = 0.0, beta_S = 0.0;
    double C_R = 0.0, C_S = 0.0;  // determinants
    double residual = 0.0;        // worst violation of the four constraints
};

std::pair<TrigPolynomial, VanishingDerivativeSystem> build_qv_two_spikes(
    const DiscreteAutocorrelation& K, double delta, double theta);

// Minimal-norm interpolant with vanishing derivatives for S sources; the
// optional output receives the Gram condition number.
TrigPolynomial build_qv_multi(const DiscreteAutocorrelation& K, const SpikeMeasure& mu,
                              double* cond_out = nullptr);

struct CertificateVerdict {
    bool interp_ok = false;
    bool extremal_ok = false;
    bool nondegenerate_ok = false;
    double sup_off_support = 0.0;
    double sup_location = 0.0;
    double max_interp_err = 0.0;
    std::vector<double> second_derivs;  // d^2|Q|/dt^2 at each source
};

CertificateVerdict verify_certificate(const TrigPolynomial& Q, const SpikeMeasure& mu,
                                      double tol = 1e-8);

struct DualVector {
    std::vector<std::complex<double>> p;
    GainVector gain;
    std::vector<double> lambdas;            // schedule actually used
    std::vector<double> successive_change;  // |p_i - p_{i-1}| / max(|p_i|, eps)
    TrigPolynomial Q() const { return adjoint(p, gain); }
};

// Dual solutions p = (z - A mu_lambda)/lambda along a decreasing lambda
// schedule; the smallest-lambda iterate approximates the minimal-norm
// noiseless dual vector.
DualVector minimal_norm_dual_approx(const Observation& obs, const GainVector& g,
                                    const std::vector<double>& lambda_seq);

}  // namespace resolimit
