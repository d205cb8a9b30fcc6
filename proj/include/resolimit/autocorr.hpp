#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "resolimit/psf.hpp"

namespace resolimit {

struct AutocorrConfig {
    int quad_nodes = 512;        // initial node budget over the band, >= 512
    double filon_tau_B = 24.0;   // switch to moment-based panels when |tau|*B exceeds this
    double kappa0_rel_tol = 1e-10;
    int max_nodes = 1 << 17;
    double im_residue_tol = 1e-10;  // relative to kappa(0)
};

// Continuous autocorrelation of a band-limited PSF and its derivatives,
//   kappa^(l)(tau) = int_{-B/2}^{B/2} (i 2 pi f)^l |G(f)|^2 e^{i 2 pi f tau} df,
// evaluated by composite Gauss-Legendre on a node set fixed at construction.
// Far-field evaluations project the power spectrum onto Legendre polynomials
// per panel so the oscillatory factor integrates in closed form.
class Autocorrelation {
public:
    Autocorrelation(const Psf& psf, const AutocorrConfig& cfg = {});

    double eval(int ell, double tau) const;
    double operator()(double tau) const { return eval(0, tau); }

    const Psf& psf() const { return psf_; }
    double bandwidth() const { return psf_.B; }
    double kappa0() const { return kappa0_; }
    int node_count() const { return static_cast<int>(f_.size()); }
    double quad_residual() const { return quad_residual_; }

private:
    double eval_direct(int ell, double tau) const;
    double eval_filon(int ell, double tau) const;
    double finish(int ell, std::complex<double> acc) const;

    Psf psf_;
    AutocorrConfig cfg_;
    std::vector<double> f_, w_, W_;           // nodes, weights, cached |G|^2
    struct Panel {
        double c, h;                          // center and half-width
        std::array<std::array<double, 18>, 4> coef;  // Legendre coefs of (2 pi f)^l W per l
    };
    std::vector<Panel> panels_;
    double kappa0_ = 0.0;
    double quad_residual_ = 0.0;              // achieved kappa(0) doubling agreement
};

Autocorrelation build_autocorrelation(const Psf& psf, int quad_nodes = 512);

// Discrete autocorrelation polynomial K(t) = sum_k |g_k|^2 e^{i 2 pi k t}
// and its derivatives; real-valued by construction.
class DiscreteAutocorrelation {
public:
    explicit DiscreteAutocorrelation(const GainVector& g);

    double eval(int ell, double t) const;
    double operator()(double t) const { return eval(0, t); }

    int N() const { return 2 * n_ + 1; }
    double B() const { return B_; }
    const std::vector<double>& weights() const { return g2_; }  // |g_k|^2, k = -n..n

private:
    std::vector<double> g2_;
    int n_ = 0;
    double B_ = 1.0;
};

DiscreteAutocorrelation build_discrete_autocorrelation(const GainVector& g);

struct ConvergenceRow {
    int N = 0;
    std::array<double, 4> sup_err{};  // per derivative order
};

// Sup over a dense torus grid of |(B/N)^(l+1) K^(l)(t) - kappa^(l)(N t / B)|.
std::vector<ConvergenceRow> check_convergence(const Autocorrelation& ac,
                                              const std::vector<int>& N_list,
                                              int grid_points = 2048);

struct RegularityReport {
    int N = 0;
    int K_max = 0;
    std::array<double, 4> S{};           // truncated sup of the aliasing sums
    std::array<double, 4> tail_bound{};  // last-term estimate times a safety factor
};

RegularityReport compute_regularity(const Autocorrelation& ac, int N, int K_max = 64);
RegularityReport compute_regularity_from(const std::function<double(int, double)>& kappa,
                                         double B, int N, int K_max = 64);

}  // namespace resolimit
