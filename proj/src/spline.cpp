#include "resolimit/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace resolimit {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 3 || y_.size() != n)
        throw std::invalid_argument("CubicSpline: need >= 3 matching points");
    for (size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("CubicSpline: abscissae must increase");

    h_ = x_[1] - x_[0];
    uniform_ = true;
    for (size_t i = 1; i + 1 < n; ++i) {
        if (std::fabs((x_[i + 1] - x_[i]) - h_) > 1e-12 * std::fabs(h_)) {
            uniform_ = false;
            break;
        }
    }

    // Tridiagonal system for interior second derivatives, natural ends.
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1];
        const double hr = x_[i + 1] - x_[i];
        sub[i] = hl;
        diag[i] = 2.0 * (hl + hr);
        sup[i] = hr;
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    // Thomas algorithm over indices 1..n-2.
    for (size_t i = 2; i + 1 < n; ++i) {
        const double f = sub[i] / diag[i - 1];
        diag[i] -= f * sup[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    for (size_t i = n - 2; i >= 1; --i) {
        const double up = (i + 2 < n) ? sup[i] * m_[i + 1] : 0.0;
        m_[i] = (rhs[i] - up) / diag[i];
        if (i == 1) break;
    }
}

size_t CubicSpline::find_interval(double t) const {
    const size_t n = x_.size();
    if (uniform_) {
        double u = (t - x_[0]) / h_;
        long k = static_cast<long>(std::floor(u));
        if (k < 0) k = 0;
        if (k > static_cast<long>(n) - 2) k = static_cast<long>(n) - 2;
        return static_cast<size_t>(k);
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    size_t k = static_cast<size_t>(it - x_.begin());
    if (k == 0) return 0;
    if (k >= n) return n - 2;
    return k - 1;
}

double CubicSpline::operator()(double t) const {
    const size_t k = find_interval(t);
    const double h = x_[k + 1] - x_[k];
    const double a = (x_[k + 1] - t) / h;
    const double b = (t - x_[k]) / h;
    return a * y_[k] + b * y_[k + 1] +
           ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double t) const {
    const size_t k = find_interval(t);
    const double h = x_[k + 1] - x_[k];
    const double a = (x_[k + 1] - t) / h;
    const double b = (t - x_[k]) / h;
    return (y_[k + 1] - y_[k]) / h +
           ((3.0 * b * b - 1.0) * m_[k + 1] - (3.0 * a * a - 1.0) * m_[k]) * h / 6.0;
}

}  // namespace resolimit
