#include "resolimit/autocorr.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "resolimit/gauss_legendre.hpp"

namespace resolimit {

namespace {

constexpr int kPanelOrder = 24;
constexpr int kLegendreDeg = 18;  // coefficients P_0..P_17

// P_m evaluated at the standard 24-point Gauss-Legendre nodes.
const std::array<std::array<double, kLegendreDeg>, kPanelOrder>& legendre_node_table() {
    static const auto table = [] {
        std::array<std::array<double, kLegendreDeg>, kPanelOrder> tab{};
        const GaussLegendreRule& rule = gauss_legendre(kPanelOrder);
        for (int j = 0; j < kPanelOrder; ++j) {
            const double x = rule.x[j];
            tab[j][0] = 1.0;
            tab[j][1] = x;
            for (int m = 1; m + 1 < kLegendreDeg; ++m)
                tab[j][m + 1] = ((2 * m + 1) * x * tab[j][m] - m * tab[j][m - 1]) / (m + 1);
        }
        return tab;
    }();
    return table;
}

// j_0..j_mmax at one argument. Ascending series for small alpha, upward
// recurrence when alpha dominates the order, Miller's downward recurrence
// with renormalization in between.
void sph_bessel_array(double alpha, double* j, int mmax) {
    if (alpha < 2.0) {
        for (int m = 0; m <= mmax; ++m) {
            double dfact = 1.0;  // (2m+1)!!
            for (int i = 1; i <= 2 * m + 1; i += 2) dfact *= i;
            double term = std::pow(alpha, m) / dfact;
            double sum = 0.0;
            for (int s = 0; s < 40 && std::fabs(term) > 1e-20 * (std::fabs(sum) + 1e-300); ++s) {
                sum += term;
                term *= -0.5 * alpha * alpha / ((s + 1.0) * (2.0 * m + 2.0 * s + 3.0));
            }
            j[m] = sum;
        }
        return;
    }
    if (alpha >= mmax + 12.0) {
        j[0] = std::sin(alpha) / alpha;
        if (mmax >= 1) j[1] = j[0] / alpha - std::cos(alpha) / alpha;
        for (int m = 1; m < mmax; ++m)
            j[m + 1] = (2 * m + 1) / alpha * j[m] - j[m - 1];
        return;
    }
    const int M = mmax + 20 + static_cast<int>(alpha);
    double jp = 0.0, jc = 1e-30;
    for (int m = M; m >= 1; --m) {
        const double jm = (2 * m + 1) / alpha * jc - jp;
        jp = jc;
        jc = jm;
        if (m - 1 <= mmax) j[m - 1] = jc;
        if (std::fabs(jc) > 1e250) {
            jp *= 1e-250;
            jc *= 1e-250;
            for (int i = m - 1; i <= mmax; ++i)
                if (i >= 0) j[i] *= 1e-250;
        }
    }
    const double s0 = std::sin(alpha) / alpha;
    const double s1 = s0 / alpha - std::cos(alpha) / alpha;
    const double scale = (std::fabs(s0) >= std::fabs(s1)) ? s0 / j[0] : s1 / j[1];
    for (int m = 0; m <= mmax; ++m) j[m] *= scale;
}

}  // namespace

Autocorrelation::Autocorrelation(const Psf& psf, const AutocorrConfig& cfg)
    : psf_(psf), cfg_(cfg) {
    if (cfg_.quad_nodes < 512) cfg_.quad_nodes = 512;
    std::vector<double> knots = psf_.knots;
    std::sort(knots.begin(), knots.end());
    if (knots.size() < 2) knots = {-0.5 * psf_.B, 0.5 * psf_.B};
    const double span = knots.back() - knots.front();
    const GaussLegendreRule& rule = gauss_legendre(kPanelOrder);

    auto build = [&](int target_nodes) {
        f_.clear();
        w_.clear();
        panels_.clear();
        for (size_t i = 0; i + 1 < knots.size(); ++i) {
            const double a = knots[i], b = knots[i + 1];
            const int np = std::max(1, static_cast<int>(
                std::lround(static_cast<double>(target_nodes) / kPanelOrder * (b - a) / span)));
            for (int p = 0; p < np; ++p) {
                const double pa = a + (b - a) * p / np;
                const double pb = a + (b - a) * (p + 1) / np;
                Panel pan;
                pan.c = 0.5 * (pa + pb);
                pan.h = 0.5 * (pb - pa);
                panels_.push_back(pan);
                append_mapped_rule(rule, pa, pb, f_, w_);
            }
        }
        W_.resize(f_.size());
        for (size_t j = 0; j < f_.size(); ++j) W_[j] = psf_.power_spectrum(f_[j]);
        double k0 = 0.0;
        for (size_t j = 0; j < f_.size(); ++j) k0 += w_[j] * W_[j];
        return k0;
    };

    int target = cfg_.quad_nodes;
    double k_prev = build(target);
    quad_residual_ = 1.0;
    while (2 * target <= cfg_.max_nodes) {
        target *= 2;
        const double k_next = build(target);
        quad_residual_ = std::fabs(k_next - k_prev) / std::max(std::fabs(k_next), 1e-300);
        k_prev = k_next;
        if (quad_residual_ <= cfg_.kappa0_rel_tol) break;
    }
    kappa0_ = k_prev;
    if (!(kappa0_ > 0.0))
        throw std::runtime_error("autocorrelation: nonpositive kappa(0), degenerate spectrum");
    if (quad_residual_ > cfg_.kappa0_rel_tol)
        std::cerr << "autocorrelation: node cap reached, kappa(0) agreement "
                  << quad_residual_ << " above target " << cfg_.kappa0_rel_tol << "\n";

    // Per-panel Legendre coefficients of (2 pi f)^l W(f) for the far-field path.
    const auto& P = legendre_node_table();
    for (size_t p = 0; p < panels_.size(); ++p) {
        Panel& pan = panels_[p];
        const size_t base = p * kPanelOrder;
        for (int ell = 0; ell < 4; ++ell) {
            for (int m = 0; m < kLegendreDeg; ++m) {
                double acc = 0.0;
                for (int jj = 0; jj < kPanelOrder; ++jj) {
                    const size_t idx = base + jj;
                    const double F = W_[idx] * std::pow(2.0 * M_PI * f_[idx], ell);
                    acc += w_[idx] * P[jj][m] * F;
                }
                pan.coef[ell][m] = (2 * m + 1) * acc / (2.0 * pan.h);
            }
        }
    }
}

double Autocorrelation::finish(int ell, std::complex<double> acc) const {
    // kappa^(l) = Re[i^l acc]; the companion component must cancel for a
    // real, even power spectrum.
    std::complex<double> rot = acc;
    switch (ell & 3) {
        case 1: rot = std::complex<double>(-acc.imag(), acc.real()); break;
        case 2: rot = -acc; break;
        case 3: rot = std::complex<double>(acc.imag(), -acc.real()); break;
        default: break;
    }
    if (std::fabs(rot.imag()) > cfg_.im_residue_tol * std::max(kappa0_, 1e-300))
        throw std::runtime_error("autocorrelation: non-real quadrature residue, spectrum asymmetric");
    return rot.real();
}

double Autocorrelation::eval_direct(int ell, double tau) const {
    std::complex<double> acc(0.0, 0.0);
    const double twoPiTau = 2.0 * M_PI * tau;
    for (size_t j = 0; j < f_.size(); ++j) {
        const double amp = w_[j] * W_[j] * std::pow(2.0 * M_PI * f_[j], ell);
        const double phi = twoPiTau * f_[j];
        acc += amp * std::complex<double>(std::cos(phi), std::sin(phi));
    }
    return finish(ell, acc);
}

double Autocorrelation::eval_filon(int ell, double tau) const {
    std::complex<double> acc(0.0, 0.0);
    double jb[kLegendreDeg];
    for (const Panel& pan : panels_) {
        const double alpha = 2.0 * M_PI * tau * pan.h;
        sph_bessel_array(alpha, jb, kLegendreDeg - 1);
        double br = 0.0, bi = 0.0;
        for (int m = 0; m < kLegendreDeg; ++m) {
            const double v = 2.0 * pan.coef[ell][m] * jb[m];
            switch (m & 3) {
                case 0: br += v; break;
                case 1: bi += v; break;
                case 2: br -= v; break;
                case 3: bi -= v; break;
            }
        }
        const double phi = 2.0 * M_PI * tau * pan.c;
        acc += pan.h * std::complex<double>(std::cos(phi), std::sin(phi)) *
               std::complex<double>(br, bi);
    }
    return finish(ell, acc);
}

double Autocorrelation::eval(int ell, double tau) const {
    if (ell < 0 || ell > 3)
        throw std::invalid_argument("autocorrelation: derivative order must be in 0..3");
    double sign = 1.0;
    if (tau < 0.0) {
        tau = -tau;
        if (ell & 1) sign = -1.0;  // kappa^(l)(-tau) = (-1)^l kappa^(l)(tau)
    }
    if (tau * psf_.B <= cfg_.filon_tau_B) return sign * eval_direct(ell, tau);
    return sign * eval_filon(ell, tau);
}

Autocorrelation build_autocorrelation(const Psf& psf, int quad_nodes) {
    AutocorrConfig cfg;
    cfg.quad_nodes = quad_nodes;
    return Autocorrelation(psf, cfg);
}

DiscreteAutocorrelation::DiscreteAutocorrelation(const GainVector& g) {
    if (g.N < 1 || g.g.empty()) throw std::invalid_argument("discrete autocorrelation: empty gains");
    n_ = g.n();
    B_ = g.B;
    g2_.resize(g.g.size());
    double total = 0.0;
    for (size_t i = 0; i < g.g.size(); ++i) {
        g2_[i] = g.g[i] * g.g[i];
        total += g2_[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("discrete autocorrelation: zero gain vector");
}

double DiscreteAutocorrelation::eval(int ell, double t) const {
    if (ell < 0 || ell > 3)
        throw std::invalid_argument("discrete autocorrelation: derivative order must be in 0..3");
    // Re[i^l e^{i phi}] = cos(phi + l pi/2)
    double acc = 0.0;
    const double shift = ell * 0.5 * M_PI;
    for (int k = -n_; k <= n_; ++k) {
        const double c = g2_[static_cast<size_t>(k + n_)];
        if (c == 0.0) continue;
        acc += c * std::pow(2.0 * M_PI * k, ell) * std::cos(2.0 * M_PI * k * t + shift);
    }
    return acc;
}

DiscreteAutocorrelation build_discrete_autocorrelation(const GainVector& g) {
    return DiscreteAutocorrelation(g);
}

std::vector<ConvergenceRow> check_convergence(const Autocorrelation& ac,
                                              const std::vector<int>& N_list,
                                              int grid_points) {
    if (grid_points < 16) grid_points = 16;
    std::vector<ConvergenceRow> rows;
    const double B = ac.bandwidth();
    for (int N : N_list) {
        if (N % 2 == 0) throw std::invalid_argument("check_convergence: N must be odd");
        const GainVector g = sample_gain(ac.psf(), N);
        const DiscreteAutocorrelation K(g);
        ConvergenceRow row;
        row.N = N;
        for (int ell = 0; ell < 4; ++ell) {
            const double scale = std::pow(B / N, ell + 1);
            double worst = 0.0;
            for (int i = 0; i < grid_points; ++i) {
                const double t = -0.5 + static_cast<double>(i) / grid_points;
                const double d = std::fabs(scale * K.eval(ell, t) - ac.eval(ell, N * t / B));
                worst = std::max(worst, d);
            }
            row.sup_err[static_cast<size_t>(ell)] = worst;
        }
        rows.push_back(row);
    }
    return rows;
}

RegularityReport compute_regularity_from(const std::function<double(int, double)>& kappa,
                                         double B, int N, int K_max) {
    if (K_max < 8) throw std::invalid_argument("compute_regularity: K_max must be >= 8");
    if (N < 1 || N % 2 == 0) throw std::invalid_argument("compute_regularity: N must be odd");
    RegularityReport rep;
    rep.N = N;
    rep.K_max = K_max;
    const int grid = 129;
    for (int ell = 0; ell < 4; ++ell) {
        double worst = 0.0, worst_last = 0.0;
        for (int i = 0; i < grid; ++i) {
            const double t = -0.5 + static_cast<double>(i) / (grid - 1);
            double sum = 0.0, last = 0.0;
            for (int k = 1; k <= K_max; ++k) {
                last = kappa(ell, N * (t + k) / B) + kappa(ell, N * (t - k) / B);
                sum += last;
            }
            worst = std::max(worst, std::fabs(sum));
            worst_last = std::max(worst_last, std::fabs(last));
        }
        rep.S[static_cast<size_t>(ell)] = worst;
        rep.tail_bound[static_cast<size_t>(ell)] = 2.0 * worst_last;
    }
    return rep;
}

RegularityReport compute_regularity(const Autocorrelation& ac, int N, int K_max) {
    return compute_regularity_from(
        [&ac](int ell, double tau) { return ac.eval(ell, tau); }, ac.bandwidth(), N, K_max);
}

}  // namespace resolimit
