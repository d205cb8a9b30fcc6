#pragma once

#include <vector>

namespace resolimit {

// Natural cubic spline on strictly increasing abscissae.
// Uniform grids get an O(1) interval lookup.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const;
    double deriv(double t) const;
    bool empty() const { return x_.empty(); }
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }

private:
    size_t find_interval(double t) const;
    std::vector<double> x_, y_, m_;  // m_ = second derivatives at the knots
    bool uniform_ = false;
    double h_ = 0.0;
};

}  // namespace resolimit
