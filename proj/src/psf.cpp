#include "resolimit/psf.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <stdexcept>

#include "resolimit/gauss_legendre.hpp"

namespace resolimit {

double Psf::spectrum(double f) const {
    const double half = 0.5 * B;
    if (std::fabs(f) > half * (1.0 + 1e-14)) return 0.0;
    if (kind == SpectrumKind::Tabulated) {
        double fc = f;
        if (fc < tab_f.front()) fc = tab_f.front();
        if (fc > tab_f.back()) fc = tab_f.back();
        return amp * interp(fc);
    }
    if (family == "ideal") return amp;
    if (family == "triangular") return amp * std::max(0.0, 1.0 - 2.0 * std::fabs(f) / B);
    if (family == "gaussian") return amp * std::exp(-2.0 * M_PI * M_PI * sigma * sigma * f * f);
    throw std::logic_error("Psf::spectrum: unknown closed-form family " + family);
}

double Psf::power_spectrum(double f) const {
    // The semicircular amplitude spectrum squares to an exact parabola;
    // using it directly avoids the interpolation error of spectrum()^2,
    // whose square-root behavior at the band edges resists splining.
    if (family == "circular") {
        const double half = 0.5 * B;
        if (std::fabs(f) > half * (1.0 + 1e-14)) return 0.0;
        const double u = 2.0 * f / B;
        return amp * amp * std::max(0.0, 1.0 - u * u);
    }
    const double v = spectrum(f);
    return v * v;
}

static void check_bandwidth(double B) {
    if (!(B > 0.0)) throw std::invalid_argument("psf: bandwidth must be positive");
}

Psf make_ideal_lowpass(double B) {
    check_bandwidth(B);
    Psf p;
    p.name = "ideal";
    p.B = B;
    p.kind = SpectrumKind::ClosedForm;
    p.family = "ideal";
    p.knots = {-0.5 * B, 0.5 * B};
    return p;
}

Psf make_triangular_lowpass(double B) {
    check_bandwidth(B);
    Psf p;
    p.name = "triangular";
    p.B = B;
    p.kind = SpectrumKind::ClosedForm;
    p.family = "triangular";
    p.knots = {-0.5 * B, 0.0, 0.5 * B};
    return p;
}

Psf make_truncated_gaussian(double sigma, double B) {
    check_bandwidth(B);
    if (!(sigma > 0.0)) throw std::invalid_argument("psf: sigma must be positive");
    Psf p;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "gaussian sigma=%g", sigma);
    p.name = buf;
    p.B = B;
    p.kind = SpectrumKind::ClosedForm;
    p.family = "gaussian";
    p.sigma = sigma;
    p.knots = {-0.5 * B, 0.5 * B};
    return p;
}

static void finish_tabulated(Psf& p) {
    p.interp = CubicSpline(p.tab_f, p.tab_G);
    p.knots = {-0.5 * p.B, 0.5 * p.B};
}

Psf make_tabulated(const std::string& name, double B, std::vector<double> f,
                   std::vector<double> G, const std::string& family) {
    check_bandwidth(B);
    if (f.size() != G.size() || f.size() < 8)
        throw std::invalid_argument("psf: tabulated spectrum needs >= 8 matching nodes");
    const double half = 0.5 * B;
    if (std::fabs(f.front() + half) > 1e-9 * B || std::fabs(f.back() - half) > 1e-9 * B)
        throw std::invalid_argument("psf: tabulated grid must span [-B/2, B/2]");
    const double h = B / static_cast<double>(f.size() - 1);
    for (size_t i = 0; i < f.size(); ++i) {
        if (std::fabs(f[i] - (-half + h * static_cast<double>(i))) > 1e-7 * B)
            throw std::invalid_argument("psf: tabulated grid must be uniform");
        if (!std::isfinite(G[i]))
            throw std::invalid_argument("psf: tabulated spectrum has a non-finite value");
    }
    Psf p;
    p.name = name;
    p.B = B;
    p.kind = SpectrumKind::Tabulated;
    p.family = family;
    p.tab_f = std::move(f);
    p.tab_G = std::move(G);
    finish_tabulated(p);
    return p;
}

Psf make_circular_lowpass(double B, int table_size) {
    check_bandwidth(B);
    if (table_size < 2049) table_size = 2049;
    Psf p;
    p.name = "circular";
    p.B = B;
    p.kind = SpectrumKind::Tabulated;
    p.family = "circular";
    // Airy-type aperture: semicircular amplitude spectrum, jinc in time.
    p.tab_f.resize(table_size);
    p.tab_G.resize(table_size);
    const double half = 0.5 * B;
    for (int i = 0; i < table_size; ++i) {
        const double f = -half + B * static_cast<double>(i) / (table_size - 1);
        const double u = 2.0 * f / B;
        p.tab_f[i] = f;
        p.tab_G[i] = std::sqrt(std::max(0.0, 1.0 - u * u));
    }
    finish_tabulated(p);
    // Guard the table: the squared spectrum integrates to 2B/3 exactly.
    double acc = 0.0;
    const double h = B / (table_size - 1);
    for (int i = 0; i + 1 < table_size; ++i) {
        const double a = p.tab_G[i] * p.tab_G[i];
        const double b = p.tab_G[i + 1] * p.tab_G[i + 1];
        acc += 0.5 * (a + b) * h;
    }
    if (std::fabs(acc - 2.0 * B / 3.0) > 1e-5 * B)
        throw std::runtime_error("make_circular_lowpass: spectrum table failed its integral check");
    return p;
}

// Time-limiting kernel of the band-limited concentration operator.
static double sinc_kernel(double u, double B) {
    if (std::fabs(u) < 1e-12) {
        const double x = M_PI * B * u;
        return B * (1.0 - x * x / 6.0);
    }
    return std::sin(M_PI * B * u) / (M_PI * u);
}

Psf make_pswf(double tau0, double B, int grid_size, PswfInfo* info, int table_size) {
    check_bandwidth(B);
    if (!(tau0 > 0.0)) throw std::invalid_argument("psf: tau0 must be positive");
    if (grid_size < 64) throw std::invalid_argument("psf: pswf grid_size must be >= 64");
    if (grid_size % 2 != 0) ++grid_size;
    if (table_size < 2049) table_size = 2049;

    // Gauss-Legendre discretization of the kernel on [-tau0, tau0],
    // restricted to the even-symmetry sector (the dominant mode is even;
    // working in the sector keeps the eigenvalue gap resolvable when the
    // full spectrum clusters near 1 at large B*tau0).
    const GaussLegendreRule& rule = gauss_legendre(grid_size);
    const int half = grid_size / 2;
    std::vector<double> t(half), w(half);
    for (int i = 0; i < half; ++i) {
        t[i] = tau0 * rule.x[half + i];  // positive nodes
        w[i] = tau0 * rule.w[half + i];
    }
    Eigen::MatrixXd Me(half, half), Mo(half, half);
    for (int i = 0; i < half; ++i) {
        for (int j = 0; j < half; ++j) {
            const double sw = std::sqrt(w[i] * w[j]);
            const double km = sinc_kernel(t[i] - t[j], B);
            const double kp = sinc_kernel(t[i] + t[j], B);
            Me(i, j) = sw * (km + kp);
            Mo(i, j) = sw * (km - kp);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ese(Me);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eso(Mo);
    if (ese.info() != Eigen::Success || eso.info() != Eigen::Success)
        throw std::runtime_error("make_pswf: eigen-solver failure");
    const double lambda0 = ese.eigenvalues()(half - 1);
    const double gap = lambda0 - ese.eigenvalues()(half - 2);
    if (gap < 1e-10)
        throw std::runtime_error("make_pswf: eigenvalue gap below 1e-10, dominant mode ambiguous");

    Eigen::VectorXd phi = ese.eigenvectors().col(half - 1);
    std::vector<double> psi(half);
    double mass = 0.0;
    for (int i = 0; i < half; ++i) {
        psi[i] = phi(i) / std::sqrt(w[i]);
        mass += w[i] * psi[i];
    }
    if (mass < 0.0)
        for (int i = 0; i < half; ++i) psi[i] = -psi[i];

    Psf p;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "pswf tau0=%g", tau0);
    p.name = buf;
    p.B = B;
    p.kind = SpectrumKind::Tabulated;
    p.family = "pswf";
    p.tau0 = tau0;
    p.tab_f.resize(table_size);
    p.tab_G.resize(table_size);
    const double halfB = 0.5 * B;
    for (int i = 0; i < table_size; ++i) {
        const double f = -halfB + B * static_cast<double>(i) / (table_size - 1);
        double acc = 0.0;
        for (int j = 0; j < half; ++j)
            acc += 2.0 * w[j] * psi[j] * std::cos(2.0 * M_PI * f * t[j]);
        p.tab_f[i] = f;
        p.tab_G[i] = acc;
    }
    // Unit L2 normalization of the spectrum (trapezoid on the table).
    double l2 = 0.0;
    const double hstep = B / (table_size - 1);
    for (int i = 0; i + 1 < table_size; ++i) {
        const double a = p.tab_G[i] * p.tab_G[i];
        const double b = p.tab_G[i + 1] * p.tab_G[i + 1];
        l2 += 0.5 * (a + b) * hstep;
    }
    if (!(l2 > 0.0)) throw std::runtime_error("make_pswf: degenerate spectrum");
    const double scale = 1.0 / std::sqrt(l2);
    for (auto& v : p.tab_G) v *= scale;
    if (p.tab_G[(table_size - 1) / 2] < 0.0)
        for (auto& v : p.tab_G) v = -v;
    finish_tabulated(p);

    if (info) {
        info->lambda0 = lambda0;
        info->even_gap = gap;
        info->lambda_odd_top = eso.eigenvalues()(half - 1);
        info->grid_size = grid_size;
    }
    return p;
}

Psf scale_amplitude(const Psf& psf, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("scale_amplitude: factor must be positive");
    Psf p = psf;
    p.amp *= c;
    return p;
}

int GainVector::nonzero_count() const {
    int cnt = 0;
    for (double v : g)
        if (v != 0.0) ++cnt;
    return cnt;
}

double GainVector::norm_sq() const {
    double acc = 0.0;
    for (double v : g) acc += v * v;
    return acc;
}

GainVector sample_gain(const Psf& psf, int N) {
    if (N < 5) throw std::invalid_argument("sample_gain: N must be >= 5");
    if (N % 2 == 0) throw std::invalid_argument("sample_gain: N must be odd");
    GainVector gv;
    gv.N = N;
    gv.B = psf.B;
    gv.psf_name = psf.name;
    const int n = (N - 1) / 2;
    gv.g.resize(static_cast<size_t>(N));
    for (int k = -n; k <= n; ++k)
        gv.g[static_cast<size_t>(k + n)] = psf.spectrum(static_cast<double>(k) * psf.B / N);
    if (gv.nonzero_count() < 4) {
        gv.low_rank_warning = true;
        std::cerr << "sample_gain: warning: fewer than four nonzero gains for "
                  << psf.name << " at N=" << N << "\n";
    }
    return gv;
}

}  // namespace resolimit
