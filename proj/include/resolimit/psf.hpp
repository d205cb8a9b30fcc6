#pragma once

#include <string>
#include <vector>

#include "resolimit/spline.hpp"

namespace resolimit {

enum class SpectrumKind { ClosedForm, Tabulated };

// A band-limited point spread function described by its real, even
// frequency spectrum G on the closed band |f| <= B/2 (zero outside).
struct Psf {
    std::string name;
    double B = 1.0;
    SpectrumKind kind = SpectrumKind::ClosedForm;

    // Closed-form payload.
    std::string family;  // "ideal" | "triangular" | "gaussian" (closed form),
                         // "circular" | "pswf" | "tabulated" (tabulated)
    double sigma = 0.0;  // gaussian width
    double tau0 = 0.0;   // pswf concentration half-width
    double amp = 1.0;    // overall amplitude factor

    // Tabulated payload: uniform grid spanning [-B/2, B/2].
    std::vector<double> tab_f;
    std::vector<double> tab_G;
    CubicSpline interp;

    // Breakpoints of the spectrum inside the band, used to split quadrature
    // panels at kinks; always contains -B/2 and B/2.
    std::vector<double> knots;

    double spectrum(double f) const;        // G(f)
    double power_spectrum(double f) const;  // |G(f)|^2
};

Psf make_ideal_lowpass(double B = 1.0);
Psf make_triangular_lowpass(double B = 1.0);
Psf make_truncated_gaussian(double sigma, double B = 1.0);
Psf make_circular_lowpass(double B = 1.0, int table_size = 4097);

struct PswfInfo {
    double lambda0 = 0.0;        // top eigenvalue of the concentration operator
    double even_gap = 0.0;       // gap to the next even-symmetric eigenvalue
    double lambda_odd_top = 0.0; // top eigenvalue of the odd sector
    int grid_size = 0;
};
Psf make_pswf(double tau0, double B = 1.0, int grid_size = 256,
              PswfInfo* info = nullptr, int table_size = 4097);

// Spectrum given on a uniform grid spanning [-B/2, B/2]; values outside
// the band evaluate to zero. family labels the payload ("tabulated" unless
// the table was produced by a named construction).
Psf make_tabulated(const std::string& name, double B, std::vector<double> f,
                   std::vector<double> G, const std::string& family = "tabulated");

// Returns a copy with the spectrum scaled by c > 0.
Psf scale_amplitude(const Psf& psf, double c);

struct GainVector {
    int N = 0;  // odd, = 2n+1
    double B = 1.0;
    std::string psf_name;
    std::vector<double> g;  // index k+n holds g_k, k = -n..n
    bool low_rank_warning = false;

    int n() const { return (N - 1) / 2; }
    double at(int k) const { return g[static_cast<size_t>(k + n())]; }
    int nonzero_count() const;
    double norm_sq() const;  // sum |g_k|^2
};

// g_k = G(k B / N); N must be odd and >= 5. Fewer than four nonzero
// entries is reported as a warning (the two-spike certificate systems
// need rank four), not an error.
GainVector sample_gain(const Psf& psf, int N);

}  // namespace resolimit
