#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace resolimit {

double wrap_torus(double t);             // representative in [-1/2, 1/2)
double wrap_dist(double a, double b);    // circular distance, in [0, 1/2]

// Trigonometric polynomial Q(t) = sum_{k=-n}^{n} q_k e^{i 2 pi k t}.
class TrigPolynomial {
public:
    TrigPolynomial() = default;
    explicit TrigPolynomial(std::vector<std::complex<double>> coef);
    static TrigPolynomial zero(int N);

    int N() const { return static_cast<int>(coef_.size()); }
    int n() const { return (N() - 1) / 2; }
    bool empty() const { return coef_.empty(); }

    std::complex<double> coef(int k) const { return coef_[static_cast<size_t>(k + n())]; }
    std::complex<double>& coef(int k) { return coef_[static_cast<size_t>(k + n())]; }
    const std::vector<std::complex<double>>& coeffs() const { return coef_; }

    std::complex<double> eval(double t) const;
    std::complex<double> deriv(int ell, double t) const;  // multiplies q_k by (i 2 pi k)^l
    bool is_hermitian(double tol = 1e-12) const;          // q_{-k} = conj(q_k)

private:
    std::vector<std::complex<double>> coef_;  // index k + n
};

// Values Q(j/M), j = 0..M-1, M a power of two at least N.
std::vector<std::complex<double>> eval_on_grid(const TrigPolynomial& Q, size_t M);

struct SupResult {
    double sup = 0.0;
    double argmax = 0.0;
};

// Supremum of |Q| over the torus minus open windows |t - center| < radius,
// via a dense grid (at least 32 N points) and quadratic refinement of the
// local maxima.
SupResult sup_modulus(const TrigPolynomial& Q,
                      const std::vector<std::pair<double, double>>& exclude = {},
                      int min_grid = 0);

// d^2|Q|/dt^2 at t; requires |Q(t)| > 1e-12.
double second_derivative_of_modulus(const TrigPolynomial& Q, double t);

}  // namespace resolimit
