#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "resolimit/autocorr.hpp"
#include "resolimit/gauss_legendre.hpp"
#include "resolimit/psf.hpp"

using namespace resolimit;

namespace {

// int_{-1/2}^{1/2} W(f) (2 pi f)^l trig(2 pi f tau) df by composite
// Gauss-Legendre with enough panels to resolve the oscillation, used as an
// independent check on the production quadrature
double brute_kappa(const Psf& psf, int ell, double tau) {
    std::vector<double> xs, ws;
    // panels split at the spectrum kinks, then fine enough for the oscillation
    for (size_t s = 0; s + 1 < psf.knots.size(); ++s) {
        const double a = psf.knots[s], b = psf.knots[s + 1];
        const int panels =
            std::max(8, static_cast<int>(std::ceil(4.0 * std::fabs(tau) * (b - a))) + 4);
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p)
            append_mapped_rule(gauss_legendre(24), a + p * h, a + (p + 1) * h, xs, ws);
    }
    double acc = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double w = psf.power_spectrum(xs[i]);
        const double ang = 2.0 * M_PI * xs[i] * tau;
        const double omega = 2.0 * M_PI * xs[i];
        double term = 0.0;
        switch (ell) {
            case 0: term = std::cos(ang); break;
            case 1: term = -omega * std::sin(ang); break;
            case 2: term = -omega * omega * std::cos(ang); break;
            case 3: term = omega * omega * omega * std::sin(ang); break;
        }
        acc += ws[i] * w * term;
    }
    return acc;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// kappa of the ideal low-pass is sinc(pi tau); derivatives follow the
// recurrences k'' = -pi^2 k - 2 k'/tau and k''' = -pi^2 k' - 2 k''/tau
// + 2 k'/tau^2, valid away from the origin
double ideal_kappa(int ell, double tau) {
    const double a = std::fabs(tau);
    const double sgn = (tau < 0.0 && (ell % 2 == 1)) ? -1.0 : 1.0;
    if (a < 1e-8) {
        const double v[4] = {1.0, 0.0, -M_PI * M_PI / 3.0, 0.0};
        return v[ell];
    }
    const double k0 = sinc(M_PI * a);
    const double k1 = (std::cos(M_PI * a) - k0) / a;
    if (ell == 0) return sgn * k0;
    if (ell == 1) return sgn * k1;
    const double k2 = -M_PI * M_PI * k0 - 2.0 * k1 / a;
    if (ell == 2) return sgn * k2;
    return sgn * (-M_PI * M_PI * k1 - 2.0 * k2 / a + 2.0 * k1 / (a * a));
}

}  // namespace

TEST_CASE("ideal autocorrelation matches sinc far into the tail") {
    Autocorrelation ac(make_ideal_lowpass());
    CHECK(ac.kappa0() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ac.eval(0, 0.5) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    CHECK(ac.eval(0, 30.25) == doctest::Approx(0.00744063071204).epsilon(1e-9));
    CHECK(ac.eval(1, 3.3) == doctest::Approx(-0.154469533991).epsilon(1e-9));
    for (int ell = 0; ell < 4; ++ell) {
        for (double tau : {0.1, 0.75, 3.3, 11.6, 30.25}) {
            CHECK(ac.eval(ell, tau) ==
                  doctest::Approx(ideal_kappa(ell, tau)).epsilon(1e-9).scale(1.0));
        }
        // even function, so odd derivatives flip sign
        CHECK(ac.eval(ell, -2.4) == doctest::Approx((ell % 2 ? -1.0 : 1.0) * ac.eval(ell, 2.4))
                                        .epsilon(1e-12));
    }
}

TEST_CASE("triangular autocorrelation matches its closed form") {
    Autocorrelation ac(make_triangular_lowpass());
    // kappa(tau) = 2 (1 - sinc(pi tau)) / (pi tau)^2, kappa(0) = 1/3
    CHECK(ac.kappa0() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (double tau : {0.4, 1.0, 1.7, 6.3, 27.1}) {
        const double x = M_PI * tau;
        const double want = 2.0 * (1.0 - sinc(x)) / (x * x);
        CHECK(ac.eval(0, tau) == doctest::Approx(want).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("gaussian autocorrelation at the origin follows the erf law") {
    // kappa(0) = int exp(-(2 pi sigma f)^2) df = sqrt(pi) erf(pi sigma B) / (2 pi sigma)
    for (double sigma : {0.5, 1.0}) {
        Autocorrelation ac(make_truncated_gaussian(sigma));
        const double want = std::sqrt(M_PI) * std::erf(M_PI * sigma) / (2.0 * M_PI * sigma);
        CHECK(ac.kappa0() == doctest::Approx(want).epsilon(1e-12));
    }
    Autocorrelation ac1(make_truncated_gaussian(1.0));
    CHECK(ac1.kappa0() == doctest::Approx(0.2820923).epsilon(1e-6));
}

TEST_CASE("circular autocorrelation has kappa(0) = 2/3 exactly") {
    Autocorrelation ac(make_circular_lowpass());
    CHECK(ac.kappa0() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(ac.eval(0, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("production quadrature agrees with a brute-force oracle") {
    // tau = 2.4 exercises the direct path, tau = 31.7 the oscillatory one
    for (const Psf& psf : {make_truncated_gaussian(0.5), make_triangular_lowpass(),
                           make_circular_lowpass()}) {
        Autocorrelation ac(psf);
        for (int ell = 0; ell < 4; ++ell) {
            for (double tau : {0.6, 2.4, 31.7}) {
                const double want = brute_kappa(psf, ell, tau);
                CHECK(ac.eval(ell, tau) == doctest::Approx(want).epsilon(1e-8).scale(1.0));
            }
        }
        CHECK(ac.quad_residual() < 1e-10);
    }
}

TEST_CASE("discrete autocorrelation of flat gains is the dirichlet kernel") {
    DiscreteAutocorrelation K(sample_gain(make_ideal_lowpass(), 5));
    CHECK(K.N() == 5);
    CHECK(K.eval(0, 0.0) == doctest::Approx(5.0).epsilon(1e-12));
    for (double t : {0.13, 0.27, -0.41}) {
        const double want = std::sin(5.0 * M_PI * t) / std::sin(M_PI * t);
        CHECK(K.eval(0, t) == doctest::Approx(want).epsilon(1e-11).scale(1.0));
    }
    // K''(0)/K(0) = -(4 pi^2 / N) sum k^2 = -8 pi^2 at N = 5
    CHECK(K.eval(2, 0.0) / K.eval(0, 0.0) == doctest::Approx(-8.0 * M_PI * M_PI).epsilon(1e-12));

    // spikes 3/N apart sit at a zero of the kernel
    DiscreteAutocorrelation K101(sample_gain(make_ideal_lowpass(), 101));
    CHECK(K101.eval(0, 3.0 / 101.0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("discrete autocorrelation of triangular gains matches direct summation") {
    GainVector g = sample_gain(make_triangular_lowpass(), 5);
    DiscreteAutocorrelation K(g);
    for (double t : {0.0, 0.09, 0.33}) {
        double want = 0.0;
        for (int k = -2; k <= 2; ++k) want += g.at(k) * g.at(k) * std::cos(2.0 * M_PI * k * t);
        CHECK(K.eval(0, t) == doctest::Approx(want).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("scaled discrete kernels converge to the limit autocorrelation") {
    for (const Psf& psf : {make_ideal_lowpass(), make_triangular_lowpass()}) {
        Autocorrelation ac(psf);
        auto rows = check_convergence(ac, {51, 101, 201});
        REQUIRE(rows.size() == 3);
        for (size_t ell = 0; ell < 4; ++ell) {
            CHECK(rows[1].sup_err[ell] < rows[0].sup_err[ell]);
            CHECK(rows[2].sup_err[ell] < rows[1].sup_err[ell]);
        }
    }
}

TEST_CASE("regularity sums agree between pipeline and injected closed form") {
    Autocorrelation ac(make_ideal_lowpass());
    auto a = compute_regularity(ac, 51, 32);
    auto b = compute_regularity_from(ideal_kappa, 1.0, 51, 32);
    for (size_t ell = 0; ell < 4; ++ell) {
        CHECK(a.S[ell] == doctest::Approx(b.S[ell]).epsilon(1e-7).scale(1.0));
        CHECK(a.tail_bound[ell] == doctest::Approx(b.tail_bound[ell]).epsilon(1e-7).scale(1.0));
    }
    CHECK(a.N == 51);
    CHECK(a.K_max == 32);
    // alias sums of the sinc kernel are finite and the tail contribution is small
    CHECK(a.S[0] > 0.0);
    CHECK(a.tail_bound[0] < a.S[0]);
}
