#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "resolimit/gauss_legendre.hpp"
#include "resolimit/parallel.hpp"
#include "resolimit/rng.hpp"
#include "resolimit/spline.hpp"

using namespace resolimit;

TEST_CASE("gauss-legendre rule integrates polynomials up to degree 2n-1") {
    const auto& rule = gauss_legendre(8);
    REQUIRE(rule.x.size() == 8);
    REQUIRE(rule.w.size() == 8);

    // int_{-1}^{1} x^p dx = 2/(p+1) for even p, 0 for odd p, exact through p = 15
    for (int p = 0; p <= 15; ++p) {
        double acc = 0.0;
        for (size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * std::pow(rule.x[i], p);
        const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
        CHECK(acc == doctest::Approx(exact).epsilon(1e-14).scale(1.0));
    }

    double mass = std::accumulate(rule.w.begin(), rule.w.end(), 0.0);
    CHECK(mass == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("gauss-legendre cache returns consistent rules") {
    const auto& a = gauss_legendre(32);
    const auto& b = gauss_legendre(32);
    REQUIRE(a.x.size() == b.x.size());
    for (size_t i = 0; i < a.x.size(); ++i) {
        CHECK(a.x[i] == b.x[i]);
        CHECK(a.w[i] == b.w[i]);
    }
    // nodes are symmetric about the origin
    for (size_t i = 0; i < a.x.size(); ++i)
        CHECK(a.x[i] == doctest::Approx(-a.x[a.x.size() - 1 - i]).epsilon(1e-15).scale(1.0));
}

TEST_CASE("mapped rule reproduces int_0^1 e^x dx") {
    std::vector<double> xs, ws;
    append_mapped_rule(gauss_legendre(16), 0.0, 1.0, xs, ws);
    REQUIRE(xs.size() == 16);
    double acc = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) acc += ws[i] * std::exp(xs[i]);
    CHECK(acc == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));

    // appending a second panel accumulates instead of overwriting
    append_mapped_rule(gauss_legendre(16), 1.0, 2.0, xs, ws);
    REQUIRE(xs.size() == 32);
    acc = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) acc += ws[i] * std::exp(xs[i]);
    CHECK(acc == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("cubic spline interpolates a smooth function") {
    const int n = 401;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = 8.0 * i / (n - 1);
        y[i] = std::sin(x[i]);
    }
    CubicSpline s(x, y);
    CHECK_FALSE(s.empty());
    CHECK(s.x_front() == doctest::Approx(0.0));
    CHECK(s.x_back() == doctest::Approx(8.0));

    // stay away from the ends where the natural boundary condition bites
    for (double t : {1.234, 2.875, 4.0, 5.901, 6.777}) {
        CHECK(s(t) == doctest::Approx(std::sin(t)).epsilon(1e-8).scale(1.0));
        CHECK(s.deriv(t) == doctest::Approx(std::cos(t)).epsilon(1e-5).scale(1.0));
    }
    // exact at the knots
    CHECK(s(x[200]) == doctest::Approx(y[200]).epsilon(1e-15));
}

TEST_CASE("rng streams are deterministic per seed") {
    Rng a(12345), b(12345), c(999);
    bool same = true, diff = false;
    for (int i = 0; i < 64; ++i) {
        const auto ua = a.next_u64();
        same = same && (ua == b.next_u64());
        diff = diff || (ua != c.next_u64());
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("rng uniform range and moments") {
    Rng rng(7);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.03));
}

TEST_CASE("rng normal and complex normal moments") {
    Rng rng(11);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.normal();
        sum += g;
        sum2 += g * g;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.03));

    double e2 = 0.0;
    for (int i = 0; i < n; ++i) e2 += std::norm(rng.cnormal());
    CHECK(e2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("seed chain decorrelates trial indices") {
    CHECK(seed_chain(42, 0, 0) == seed_chain(42, 0, 0));
    CHECK(seed_chain(42, 0, 0) != seed_chain(42, 0, 1));
    CHECK(seed_chain(42, 0, 0) != seed_chain(42, 1, 0));
    CHECK(seed_chain(42, 0, 0) != seed_chain(43, 0, 0));
    // first draws from adjacent chains should not collide
    Rng a(seed_chain(1, 2, 3)), b(seed_chain(1, 2, 4));
    CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("parallel_for covers every index exactly once") {
    const size_t n = 10000;
    for (int threads : {1, 2, 4}) {
        std::vector<std::atomic<int>> hits(n);
        for (auto& h : hits) h.store(0);
        parallel_for(n, threads, [&](size_t i) { hits[i].fetch_add(1); });
        bool ok = true;
        for (auto& h : hits) ok = ok && (h.load() == 1);
        CHECK(ok);
    }
}

TEST_CASE("parallel_for rethrows worker exceptions") {
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](size_t i) {
                                     if (i == 57) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("thread count resolution honors explicit requests") {
    CHECK(resolve_thread_count(3) == 3);
    CHECK(resolve_thread_count(1) == 1);
    CHECK(resolve_thread_count(0) >= 1);
}
