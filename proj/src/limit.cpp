#include "resolimit/limit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resolimit/parallel.hpp"

namespace resolimit {

namespace {

// Per-beta scalars shared by the searches and the certificate.
struct BetaCtx {
    double beta = 0.0;
    double k0 = 0.0, k0pp = 0.0;
    double kb = 0.0, kbp = 0.0, kbpp = 0.0, kbppp = 0.0;
    double As = 0.0, Ar = 0.0;  // -k''(0) -+ k''(beta)
    double Cs = 0.0, Cr = 0.0;
};

BetaCtx make_ctx(const LimitKernel& K, double beta, bool check_degenerate) {
    BetaCtx c;
    c.beta = beta;
    c.k0 = K.eval(0, 0.0);
    c.k0pp = K.eval(2, 0.0);
    c.kb = K.eval(0, beta);
    c.kbp = K.eval(1, beta);
    c.kbpp = K.eval(2, beta);
    c.kbppp = K.eval(3, beta);
    c.As = -c.k0pp - c.kbpp;
    c.Ar = -c.k0pp + c.kbpp;
    c.Cs = c.As * (c.k0 - c.kb) - c.kbp * c.kbp;
    c.Cr = c.Ar * (c.k0 + c.kb) - c.kbp * c.kbp;
    if (check_degenerate) {
        const double scale = std::max(1.0, c.k0 * std::fabs(c.k0pp));
        if (c.Cs <= 1e-13 * scale || c.Cr <= 1e-13 * scale)
            throw std::runtime_error(
                "limit certificate: degenerate separation, normalization constant not positive");
    }
    return c;
}

double golden_max(const std::function<double(double)>& g, double a, double b, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = g(c), fd = g(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = g(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = g(d);
        }
    }
    return std::max(fc, fd);
}

// Supremum of |f| over [lo, hi] minus an optional open window around ex_c.
// Grid scan, then golden-section refinement of every local maximum and of the
// window edges.
double sup_abs(const std::function<double(double)>& f, double lo, double hi, double step,
               double ex_c, double ex_w, double tol) {
    const int m = std::max(4, static_cast<int>(std::ceil((hi - lo) / step)));
    const double h = (hi - lo) / m;
    std::vector<double> v(m + 1);
    std::vector<char> ok(m + 1);
    for (int i = 0; i <= m; ++i) {
        const double t = lo + h * i;
        ok[i] = !(ex_w > 0.0 && std::fabs(t - ex_c) <= ex_w);
        v[i] = ok[i] ? std::fabs(f(t)) : -1.0;
    }
    double best = 0.0;
    auto g = [&f](double t) { return std::fabs(f(t)); };
    auto refine = [&](double a, double b) {
        if (ex_w > 0.0) {  // keep the bracket on one side of the window
            const double le = ex_c - ex_w, re = ex_c + ex_w;
            if (b > le && a < re) {
                if (a < le) b = std::min(b, le);
                else a = std::max(a, re);
            }
        }
        a = std::max(a, lo);
        b = std::min(b, hi);
        if (b - a > 1e-14) best = std::max(best, golden_max(g, a, b, tol));
    };
    for (int i = 0; i <= m; ++i) {
        if (!ok[i]) continue;
        best = std::max(best, v[i]);
        const double left = (i > 0) ? v[i - 1] : -1.0;
        const double right = (i < m) ? v[i + 1] : -1.0;
        if (v[i] >= left && v[i] >= right) refine(lo + h * (i - 1), lo + h * (i + 1));
    }
    if (ex_w > 0.0) {
        const double le = ex_c - ex_w, re = ex_c + ex_w;
        if (le > lo) refine(le - h, le);
        if (re < hi) refine(re, re + h);
    }
    return best;
}

enum class Cond { OddPart, EvenPart, Concavity };

// True when beta lies in the failing set of the given condition.
bool condition_fails(const LimitKernel& K, double beta, Cond which, const SearchConfig& cfg) {
    if (which == Cond::Concavity) {
        const BetaCtx c = make_ctx(K, beta, false);
        const double D = -c.k0pp * c.k0pp + c.kbpp * c.kbpp - c.kbp * c.kbppp;
        return D >= 0.0;
    }
    const BetaCtx c = make_ctx(K, beta, true);
    const double half = 0.5 * beta;
    const double tau_hi = half + cfg.tau_pad;
    std::function<double(double)> fn;
    double ref = 0.0;
    if (which == Cond::OddPart) {
        fn = [&K, &c, half](double tau) {
            const double vv = K.eval(0, tau - half) - K.eval(0, tau + half);
            const double up = K.eval(1, tau - half) + K.eval(1, tau + half);
            return c.As * vv - c.kbp * up;
        };
        ref = c.Cs;
    } else {
        fn = [&K, &c, half](double tau) {
            const double uu = K.eval(0, tau - half) + K.eval(0, tau + half);
            const double vp = K.eval(1, tau - half) - K.eval(1, tau + half);
            return c.Ar * uu + c.kbp * vp;
        };
        ref = c.Cr;
    }
    const double sup = sup_abs(fn, 0.0, tau_hi, cfg.tau_step, half,
                               cfg.exclusion_halfwidth, cfg.golden_tol);
    return sup > ref;
}

GammaComponent run_search(const LimitKernel& K, double B, Cond which, const SearchConfig& cfg) {
    if (!(cfg.beta_min > 0.0) || !(cfg.beta_max > cfg.beta_min))
        throw std::invalid_argument("gamma search: invalid beta range");
    const int m = std::max(1, static_cast<int>(std::lround((cfg.beta_max - cfg.beta_min) / cfg.beta_step)));
    std::vector<double> betas(m + 1);
    for (int i = 0; i <= m; ++i)
        betas[i] = cfg.beta_min + (cfg.beta_max - cfg.beta_min) * i / m;
    std::vector<char> fails(m + 1, 0);
    const int threads = resolve_thread_count(cfg.threads);
    parallel_for(m + 1, threads, [&](int i) {
        fails[i] = condition_fails(K, betas[i], which, cfg) ? 1 : 0;
    });

    GammaComponent comp;
    for (int i = 0; i < m; ++i)
        if (fails[i] != fails[i + 1])
            comp.sign_changes.push_back(0.5 * (betas[i] + betas[i + 1]));
    if (fails[m])
        throw std::runtime_error("gamma search: condition still fails at beta_max, widen the search range");
    int last_fail = -1;
    for (int i = 0; i < m; ++i)
        if (fails[i] && !fails[i + 1]) last_fail = i;
    if (last_fail < 0) {
        comp.value = B * cfg.beta_min;
        comp.lower_bound = true;
        return comp;
    }
    double lo = betas[last_fail], hi = betas[last_fail + 1];
    int iters = 0;
    while (hi - lo > cfg.bisect_tol && iters < 64) {
        const double mid = 0.5 * (lo + hi);
        if (condition_fails(K, mid, which, cfg)) lo = mid;
        else hi = mid;
        ++iters;
    }
    comp.value = B * 0.5 * (lo + hi);
    comp.bisect_iters = iters;
    comp.bracket_width = hi - lo;
    return comp;
}

}  // namespace

LimitKernel::LimitKernel(const Autocorrelation& ac, double tau_max, double step)
    : tau_max_(tau_max) {
    build([&ac](int ell, double tau) { return ac.eval(ell, tau); }, step);
}

LimitKernel::LimitKernel(const std::function<double(int, double)>& kappa, double tau_max,
                         double step)
    : tau_max_(tau_max) {
    build(kappa, step);
}

void LimitKernel::build(const std::function<double(int, double)>& kappa, double step) {
    if (!(tau_max_ > 0.0)) throw std::invalid_argument("limit kernel: tau_max must be positive");
    if (!(step > 0.0 && step <= 0.01)) throw std::invalid_argument("limit kernel: bad step");
    // Pad both ends so the natural-spline boundary error decays away from the
    // region that is actually queried.
    const double lo = -0.02, hi = tau_max_ + 0.02;
    const int npts = static_cast<int>(std::ceil((hi - lo) / step)) + 1;
    std::vector<double> xs(npts);
    for (int i = 0; i < npts; ++i) xs[i] = lo + (hi - lo) * i / (npts - 1);
    for (int ell = 0; ell < 4; ++ell) {
        std::vector<double> ys(npts);
        for (int i = 0; i < npts; ++i) ys[i] = kappa(ell, xs[i]);
        s_[static_cast<size_t>(ell)] = CubicSpline(xs, ys);
    }
}

double LimitKernel::eval(int ell, double tau) const {
    if (ell < 0 || ell > 3)
        throw std::invalid_argument("limit kernel: derivative order must be in 0..3");
    double sign = 1.0;
    if (tau < 0.0) {
        tau = -tau;
        if (ell & 1) sign = -1.0;
    }
    if (tau > tau_max_ + 1e-9)
        throw std::logic_error("limit kernel: tau beyond the cached range");
    return sign * s_[static_cast<size_t>(ell)](tau);
}

LimitCertificate::LimitCertificate(LimitKernel kernel, double beta, double theta)
    : kernel_(std::move(kernel)), beta_(beta), theta_(theta) {
    if (!(beta > 0.0)) throw std::invalid_argument("limit certificate: beta must be positive");
    if (theta < -1e-12 || theta > M_PI + 1e-12)
        throw std::invalid_argument("limit certificate: theta must lie in [0, pi]");
    const BetaCtx c = make_ctx(kernel_, beta_, true);
    As_ = c.As;
    Ar_ = c.Ar;
    kbp_ = c.kbp;
    Cs_ = c.Cs;
    Cr_ = c.Cr;
}

double LimitCertificate::u(double tau, int order) const {
    return kernel_.eval(order, tau - 0.5 * beta_) + kernel_.eval(order, tau + 0.5 * beta_);
}

double LimitCertificate::v(double tau, int order) const {
    return kernel_.eval(order, tau - 0.5 * beta_) - kernel_.eval(order, tau + 0.5 * beta_);
}

double LimitCertificate::r_tilde(double tau, int order) const {
    if (order < 0 || order > 2)
        throw std::invalid_argument("limit certificate: derivative order must be in 0..2");
    return Ar_ * u(tau, order) + kbp_ * v(tau, order + 1);
}

double LimitCertificate::s_tilde(double tau, int order) const {
    if (order < 0 || order > 2)
        throw std::invalid_argument("limit certificate: derivative order must be in 0..2");
    return As_ * v(tau, order) - kbp_ * u(tau, order + 1);
}

std::complex<double> LimitCertificate::QV(double tau, int order) const {
    return {std::cos(0.5 * theta_) * r(tau, order), std::sin(0.5 * theta_) * s(tau, order)};
}

double LimitCertificate::modulus(double tau) const {
    const double cr = std::cos(0.5 * theta_) * r(tau);
    const double ci = std::sin(0.5 * theta_) * s(tau);
    return std::sqrt(cr * cr + ci * ci);
}

double LimitCertificate::interp_concavity() const {
    // r''(beta/2) = D / C_r and s''(beta/2) = D / C_s share the numerator
    // D = -k''(0)^2 + k''(beta)^2 - k'(beta) k'''(beta).
    const double k0pp = kernel_.eval(2, 0.0);
    const double kbpp = kernel_.eval(2, beta_);
    const double kbppp = kernel_.eval(3, beta_);
    const double D = -k0pp * k0pp + kbpp * kbpp - kbp_ * kbppp;
    const double ch = std::cos(0.5 * theta_), sh = std::sin(0.5 * theta_);
    return ch * ch * D / Cr_ + sh * sh * D / Cs_;
}

LimitCertificate build_limit_certificate(const Autocorrelation& ac, double beta,
                                         double theta, double tau_max) {
    if (tau_max <= 0.0) tau_max = beta + 20.0;
    LimitKernel kernel(ac, tau_max);
    return LimitCertificate(std::move(kernel), beta, theta);
}

LimitConditions check_limit_conditions(const LimitCertificate& cert, const SearchConfig& cfg) {
    LimitConditions out;
    out.concavity_ok = cert.interp_concavity() < 0.0;
    const double half = 0.5 * cert.beta();
    const double tau_hi = std::min(half + cfg.tau_pad, cert.kernel().tau_max() - half - 1e-9);
    const double sup = sup_abs([&cert](double t) { return cert.modulus(t); }, 0.0, tau_hi,
                               cfg.tau_step, half, cfg.exclusion_halfwidth, cfg.golden_tol);
    out.margin = 1.0 - sup;
    out.modulus_ok = sup < 1.0;
    return out;
}

GammaComponent gamma1_component(const LimitKernel& kernel, double B, const SearchConfig& cfg) {
    return run_search(kernel, B, Cond::OddPart, cfg);
}

GammaComponent gamma2_component(const LimitKernel& kernel, double B, const SearchConfig& cfg) {
    return run_search(kernel, B, Cond::EvenPart, cfg);
}

GammaComponent gamma3_component(const LimitKernel& kernel, double B, const SearchConfig& cfg) {
    return run_search(kernel, B, Cond::Concavity, cfg);
}

double gamma1(const Autocorrelation& ac, const SearchConfig& cfg) {
    LimitKernel kernel(ac, cfg.beta_max + cfg.tau_pad);
    return gamma1_component(kernel, ac.bandwidth(), cfg).value;
}

double gamma2(const Autocorrelation& ac, const SearchConfig& cfg) {
    LimitKernel kernel(ac, cfg.beta_max + cfg.tau_pad);
    return gamma2_component(kernel, ac.bandwidth(), cfg).value;
}

double gamma3(const Autocorrelation& ac, const SearchConfig& cfg) {
    LimitKernel kernel(ac, cfg.beta_max + cfg.tau_pad);
    return gamma3_component(kernel, ac.bandwidth(), cfg).value;
}

GammaStarReport compute_gamma_star(const Autocorrelation& ac, const SearchConfig& cfg) {
    LimitKernel kernel(ac, cfg.beta_max + cfg.tau_pad);
    GammaStarReport rep;
    rep.psf_name = ac.psf().name;
    rep.B = ac.bandwidth();
    rep.beta_min = cfg.beta_min;
    rep.beta_max = cfg.beta_max;
    rep.diag1 = gamma1_component(kernel, rep.B, cfg);
    rep.diag2 = gamma2_component(kernel, rep.B, cfg);
    rep.diag3 = gamma3_component(kernel, rep.B, cfg);
    rep.gamma1 = rep.diag1.value;
    rep.gamma2 = rep.diag2.value;
    rep.gamma3 = rep.diag3.value;
    rep.gamma_star = std::max({rep.gamma1, rep.gamma2, rep.gamma3});
    return rep;
}

GammaStarReport compute_gamma_star(const Psf& psf, const SearchConfig& cfg) {
    const Autocorrelation ac(psf);
    return compute_gamma_star(ac, cfg);
}

}  // namespace resolimit
