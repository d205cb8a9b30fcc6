#include "resolimit/trigpoly.hpp"

#include <cmath>
#include <stdexcept>

#include "resolimit/fft.hpp"

namespace resolimit {

double wrap_torus(double t) {
    double r = t - std::floor(t + 0.5);
    if (r >= 0.5) r -= 1.0;  // floor rounding at the seam
    return r;
}

double wrap_dist(double a, double b) {
    const double d = std::fabs(wrap_torus(a - b));
    return std::min(d, 1.0 - d);
}

TrigPolynomial::TrigPolynomial(std::vector<std::complex<double>> coef)
    : coef_(std::move(coef)) {
    if (coef_.empty() || coef_.size() % 2 == 0)
        throw std::invalid_argument("trig polynomial: coefficient count must be odd");
}

TrigPolynomial TrigPolynomial::zero(int N) {
    if (N < 1 || N % 2 == 0)
        throw std::invalid_argument("trig polynomial: N must be odd and positive");
    return TrigPolynomial(std::vector<std::complex<double>>(static_cast<size_t>(N)));
}

std::complex<double> TrigPolynomial::eval(double t) const {
    // Horner in z = e^{i 2 pi t}: Q = z^{-n} (q_{-n} + z (q_{-n+1} + ...))
    const std::complex<double> z = std::polar(1.0, 2.0 * M_PI * t);
    std::complex<double> acc(0.0, 0.0);
    for (size_t i = coef_.size(); i-- > 0;) acc = acc * z + coef_[i];
    return acc * std::polar(1.0, -2.0 * M_PI * t * n());
}

std::complex<double> TrigPolynomial::deriv(int ell, double t) const {
    if (ell < 0) throw std::invalid_argument("trig polynomial: negative derivative order");
    if (ell == 0) return eval(t);
    const std::complex<double> z = std::polar(1.0, 2.0 * M_PI * t);
    std::complex<double> acc(0.0, 0.0);
    const int nn = n();
    for (size_t i = coef_.size(); i-- > 0;) {
        const int k = static_cast<int>(i) - nn;
        std::complex<double> c = coef_[i];
        const std::complex<double> f(0.0, 2.0 * M_PI * k);
        for (int l = 0; l < ell; ++l) c *= f;
        acc = acc * z + c;
    }
    return acc * std::polar(1.0, -2.0 * M_PI * t * nn);
}

bool TrigPolynomial::is_hermitian(double tol) const {
    const int nn = n();
    for (int k = 0; k <= nn; ++k)
        if (std::abs(coef(-k) - std::conj(coef(k))) > tol) return false;
    return true;
}

std::vector<std::complex<double>> eval_on_grid(const TrigPolynomial& Q, size_t M) {
    if (M < static_cast<size_t>(Q.N()) || (M & (M - 1)) != 0)
        throw std::invalid_argument("eval_on_grid: grid must be a power of two covering N");
    std::vector<std::complex<double>> a(M, std::complex<double>(0.0, 0.0));
    const int nn = Q.n();
    for (int k = -nn; k <= nn; ++k)
        a[static_cast<size_t>((k % static_cast<int>(M) + static_cast<int>(M)) %
                              static_cast<int>(M))] += Q.coef(k);
    fft_inplace(a, +1);
    return a;
}

namespace {

// Safeguarded Newton ascent on |Q|^2 restricted to [lo, hi].
double refine_max(const TrigPolynomial& Q, double lo, double hi, double t0) {
    auto m2 = [&Q](double x) { return std::norm(Q.eval(x)); };
    double t = std::min(std::max(t0, lo), hi);
    double best_t = t, best_v = m2(t);
    for (int it = 0; it < 40; ++it) {
        const std::complex<double> q = Q.eval(t);
        const std::complex<double> q1 = Q.deriv(1, t);
        const std::complex<double> q2 = Q.deriv(2, t);
        const double g = 2.0 * std::real(std::conj(q) * q1);
        const double H = 2.0 * std::real(std::conj(q) * q2) + 2.0 * std::norm(q1);
        double step;
        if (H < 0.0) step = -g / H;
        else step = (g >= 0.0 ? 0.25 : -0.25) * (hi - lo);
        if (t + step > hi) step = hi - t;
        if (t + step < lo) step = lo - t;
        double tn = t + step;
        double vn = m2(tn);
        int bt = 0;
        while (vn < best_v && bt < 20 && std::fabs(step) > 1e-16) {
            step *= 0.5;
            tn = t + step;
            vn = m2(tn);
            ++bt;
        }
        t = tn;
        if (vn >= best_v) {
            best_v = vn;
            best_t = tn;
        }
        if (std::fabs(step) < 1e-14) break;
    }
    return best_t;
}

}  // namespace

SupResult sup_modulus(const TrigPolynomial& Q,
                      const std::vector<std::pair<double, double>>& exclude, int min_grid) {
    if (Q.empty()) return {0.0, 0.0};
    int base = std::max(32 * Q.N(), 256);
    if (min_grid > base) base = min_grid;
    const size_t M = next_pow2(static_cast<size_t>(base));
    const auto vals = eval_on_grid(Q, M);
    std::vector<double> m(M);
    for (size_t j = 0; j < M; ++j) m[j] = std::abs(vals[j]);

    auto excluded = [&exclude](double t) {
        for (const auto& w : exclude)
            if (wrap_dist(t, w.first) < w.second) return true;
        return false;
    };
    const double h = 1.0 / static_cast<double>(M);

    SupResult out{-1.0, 0.0};
    auto consider = [&](double t) {
        const double v = std::abs(Q.eval(t));
        if (v > out.sup) {
            out.sup = v;
            out.argmax = wrap_torus(t);
        }
    };
    auto refine_and_consider = [&](double lo, double hi, double t0) {
        double t = refine_max(Q, lo, hi, t0);
        if (excluded(t)) {
            // stepped into a window; fall back to the nearest admissible edge
            for (const auto& w : exclude) {
                if (wrap_dist(t, w.first) < w.second) {
                    const double le = w.first - w.second, re = w.first + w.second;
                    t = (wrap_dist(t0, le) <= wrap_dist(t0, re)) ? le : re;
                    break;
                }
            }
            if (excluded(t)) return;
        }
        consider(t);
    };

    bool any = false;
    for (size_t j = 0; j < M; ++j) {
        const double t = static_cast<double>(j) * h - (j >= M / 2 ? 1.0 : 0.0);
        if (excluded(t)) continue;
        any = true;
        if (m[j] > out.sup) {
            out.sup = m[j];
            out.argmax = wrap_torus(t);
        }
        const double prev = m[(j + M - 1) % M];
        const double next = m[(j + 1) % M];
        if (m[j] >= prev && m[j] >= next) refine_and_consider(t - h, t + h, t);
    }
    for (const auto& w : exclude) {
        const double le = w.first - w.second, re = w.first + w.second;
        if (!excluded(le)) {
            consider(le);
            refine_and_consider(le - h, le, le);
            any = true;
        }
        if (!excluded(re)) {
            consider(re);
            refine_and_consider(re, re + h, re);
            any = true;
        }
    }
    if (!any) return {0.0, 0.0};
    return out;
}

double second_derivative_of_modulus(const TrigPolynomial& Q, double t) {
    const std::complex<double> q = Q.eval(t);
    const double m = std::abs(q);
    if (m <= 1e-12)
        throw std::runtime_error("second_derivative_of_modulus: vanishing modulus at t");
    const std::complex<double> q1 = Q.deriv(1, t);
    const std::complex<double> q2 = Q.deriv(2, t);
    const double a = std::real(std::conj(q) * q2) + std::norm(q1);
    const double b = std::real(std::conj(q) * q1);
    return a / m - b * b / (m * m * m);
}

}  // namespace resolimit
