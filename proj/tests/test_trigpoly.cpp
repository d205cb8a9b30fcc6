#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "resolimit/rng.hpp"
#include "resolimit/trigpoly.hpp"

using namespace resolimit;
using cplx = std::complex<double>;

namespace {

TrigPolynomial random_poly(int N, uint64_t seed, bool hermitian) {
    Rng rng(seed);
    std::vector<cplx> c(static_cast<size_t>(N));
    for (auto& v : c) v = rng.cnormal();
    TrigPolynomial Q(c);
    if (hermitian) {
        for (int k = 1; k <= Q.n(); ++k) Q.coef(-k) = std::conj(Q.coef(k));
        Q.coef(0) = Q.coef(0).real();
    }
    return Q;
}

}  // namespace

TEST_CASE("torus wrapping") {
    CHECK(wrap_torus(0.3) == doctest::Approx(0.3));
    CHECK(wrap_torus(0.5) == doctest::Approx(-0.5));
    CHECK(wrap_torus(-0.5) == doctest::Approx(-0.5));
    CHECK(wrap_torus(1.26) == doctest::Approx(0.26));
    CHECK(wrap_torus(-3.74) == doctest::Approx(0.26));
    CHECK(wrap_dist(0.1, 0.25) == doctest::Approx(0.15));
    CHECK(wrap_dist(-0.49, 0.49) == doctest::Approx(0.02));
    CHECK(wrap_dist(0.0, 0.5) == doctest::Approx(0.5));
    CHECK(wrap_dist(0.2, 0.2) == doctest::Approx(0.0));
}

TEST_CASE("evaluation matches the direct exponential sum") {
    TrigPolynomial Q = random_poly(11, 31, false);
    REQUIRE(Q.N() == 11);
    REQUIRE(Q.n() == 5);
    for (double t : {0.0, 0.17, -0.42, 0.5}) {
        cplx want = 0.0;
        for (int k = -5; k <= 5; ++k)
            want += Q.coef(k) * std::exp(cplx(0.0, 2.0 * M_PI * k * t));
        CHECK(std::abs(Q.eval(t) - want) < 1e-13);
    }
    // periodicity
    CHECK(std::abs(Q.eval(0.3) - Q.eval(1.3)) < 1e-12);
}

TEST_CASE("derivatives agree with central differences") {
    TrigPolynomial Q = random_poly(21, 77, true);
    const double h = 1e-5;
    for (double t : {0.05, -0.31}) {
        const cplx d1 = (Q.eval(t + h) - Q.eval(t - h)) / (2.0 * h);
        CHECK(std::abs(Q.deriv(1, t) - d1) < 1e-5 * (1.0 + std::abs(d1)));
        const cplx d2 = (Q.eval(t + h) - 2.0 * Q.eval(t) + Q.eval(t - h)) / (h * h);
        CHECK(std::abs(Q.deriv(2, t) - d2) < 1e-3 * (1.0 + std::abs(d2)));
    }
    CHECK(std::abs(Q.deriv(0, 0.2) - Q.eval(0.2)) == doctest::Approx(0.0));
}

TEST_CASE("hermitian detection") {
    CHECK(random_poly(15, 5, true).is_hermitian());
    TrigPolynomial Q = random_poly(15, 5, true);
    Q.coef(3) += cplx(0.1, 0.0);
    CHECK_FALSE(Q.is_hermitian());
    // hermitian coefficients give a real-valued polynomial
    TrigPolynomial H = random_poly(15, 9, true);
    for (double t : {0.11, 0.37}) CHECK(std::abs(H.eval(t).imag()) < 1e-13);
}

TEST_CASE("grid evaluation agrees with pointwise evaluation") {
    TrigPolynomial Q = random_poly(13, 2, false);
    const size_t M = 64;
    auto grid = eval_on_grid(Q, M);
    REQUIRE(grid.size() == M);
    for (size_t j = 0; j < M; j += 7) {
        const double t = static_cast<double>(j) / M;
        CHECK(std::abs(grid[j] - Q.eval(t)) < 1e-12);
    }
}

TEST_CASE("sup of a single mode and of the dirichlet kernel") {
    TrigPolynomial mode = TrigPolynomial::zero(7);
    mode.coef(2) = cplx(0.0, 1.0);
    auto r = sup_modulus(mode);
    CHECK(r.sup == doctest::Approx(1.0).epsilon(1e-12));

    const int N = 11;
    TrigPolynomial dirichlet = TrigPolynomial::zero(N);
    for (int k = -5; k <= 5; ++k) dirichlet.coef(k) = 1.0;
    auto full = sup_modulus(dirichlet);
    CHECK(full.sup == doctest::Approx(11.0).epsilon(1e-10));
    CHECK(std::abs(wrap_torus(full.argmax)) < 1e-6);

    // excluding the main lobe leaves the first sidelobe; the sidelobe peak of
    // sin(N pi t)/sin(pi t) sits near t = 1.5/N
    auto side = sup_modulus(dirichlet, {{0.0, 1.0 / N}});
    CHECK(side.sup < 11.0 * 0.25);
    CHECK(side.sup > 11.0 * 0.18);
    CHECK(wrap_dist(std::fabs(wrap_torus(side.argmax)), 1.5 / N) < 0.2 / N);
}

TEST_CASE("modulus curvature at a smooth maximum") {
    // |Q| for Q = cos(2 pi t) has second derivative -4 pi^2 at the peak
    TrigPolynomial Q = TrigPolynomial::zero(3);
    Q.coef(1) = 0.5;
    Q.coef(-1) = 0.5;
    CHECK(second_derivative_of_modulus(Q, 0.0) ==
          doctest::Approx(-4.0 * M_PI * M_PI).epsilon(1e-6));

    // 1.5 + cos(2 pi t) stays positive and has a smooth valley at t = 1/2
    TrigPolynomial P = TrigPolynomial::zero(3);
    P.coef(0) = 1.5;
    P.coef(1) = 0.5;
    P.coef(-1) = 0.5;
    CHECK(second_derivative_of_modulus(P, 0.5) ==
          doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-6));
}
