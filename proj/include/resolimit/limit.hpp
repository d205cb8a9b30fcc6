#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "resolimit/autocorr.hpp"
#include "resolimit/spline.hpp"

namespace resolimit {

struct SearchConfig {
    double beta_min = 0.2;
    double beta_max = 4.0;
    double beta_step = 0.01;
    double tau_step = 0.005;
    double tau_pad = 20.0;       // per-beta sup range is [0, beta/2 + tau_pad]
    double exclusion_halfwidth = 0.02;
    double golden_tol = 1e-6;
    double bisect_tol = 1e-4;
    int threads = 0;
};

// Dense spline tables of kappa^(l), l = 0..3, so the beta/tau searches do not
// hit the quadrature for every point. Parity handled on query.
class LimitKernel {
public:
    LimitKernel(const Autocorrelation& ac, double tau_max, double step = 1e-3);
    LimitKernel(const std::function<double(int, double)>& kappa, double tau_max,
                double step = 1e-3);

    double eval(int ell, double tau) const;
    double tau_max() const { return tau_max_; }

private:
    void build(const std::function<double(int, double)>& kappa, double step);
    std::array<CubicSpline, 4> s_;
    double tau_max_ = 0.0;
};

// Limit analog of the vanishing-derivative interpolation certificate for two
// unit spikes at +-beta/2 with phase difference theta.
class LimitCertificate {
public:
    LimitCertificate(LimitKernel kernel, double beta, double theta);

    double u(double tau, int order = 0) const;  // even combination, order <= 3
    double v(double tau, int order = 0) const;  // odd combination
    double r_tilde(double tau, int order = 0) const;  // order <= 2
    double s_tilde(double tau, int order = 0) const;
    double Cr() const { return Cr_; }
    double Cs() const { return Cs_; }
    double r(double tau, int order = 0) const { return r_tilde(tau, order) / Cr_; }
    double s(double tau, int order = 0) const { return s_tilde(tau, order) / Cs_; }

    std::complex<double> QV(double tau, int order = 0) const;
    double modulus(double tau) const;
    // Closed form of d^2|Q_V|/dtau^2 at the interpolation point beta/2.
    double interp_concavity() const;

    double beta() const { return beta_; }
    double theta() const { return theta_; }
    const LimitKernel& kernel() const { return kernel_; }

private:
    LimitKernel kernel_;
    double beta_, theta_;
    double As_ = 0.0, Ar_ = 0.0;  // s/r multipliers -k''(0) -+ k''(beta)
    double kbp_ = 0.0;            // k'(beta)
    double Cr_ = 0.0, Cs_ = 0.0;
};

LimitCertificate build_limit_certificate(const Autocorrelation& ac, double beta,
                                         double theta, double tau_max = 0.0);

struct LimitConditions {
    bool concavity_ok = false;
    bool modulus_ok = false;
    double margin = 0.0;  // 1 - sup of |Q_V| outside the interpolation window
};

LimitConditions check_limit_conditions(const LimitCertificate& cert,
                                       const SearchConfig& cfg = {});

struct GammaComponent {
    double value = 0.0;           // already scaled by the bandwidth
    bool lower_bound = false;     // condition never failed on the grid
    int bisect_iters = 0;
    double bracket_width = 0.0;
    std::vector<double> sign_changes;  // every fail/pass boundary seen on the beta grid
};

struct GammaStarReport {
    double gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0;
    double gamma_star = 0.0;
    std::string psf_name;
    double B = 1.0;
    double beta_min = 0.0, beta_max = 0.0;
    GammaComponent diag1, diag2, diag3;
};

GammaComponent gamma1_component(const LimitKernel& kernel, double B,
                                const SearchConfig& cfg = {});
GammaComponent gamma2_component(const LimitKernel& kernel, double B,
                                const SearchConfig& cfg = {});
GammaComponent gamma3_component(const LimitKernel& kernel, double B,
                                const SearchConfig& cfg = {});

double gamma1(const Autocorrelation& ac, const SearchConfig& cfg = {});
double gamma2(const Autocorrelation& ac, const SearchConfig& cfg = {});
double gamma3(const Autocorrelation& ac, const SearchConfig& cfg = {});

GammaStarReport compute_gamma_star(const Psf& psf, const SearchConfig& cfg = {});
GammaStarReport compute_gamma_star(const Autocorrelation& ac, const SearchConfig& cfg = {});

}  // namespace resolimit
