#include "resolimit/gauss_legendre.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace resolimit {

static GaussLegendreRule compute_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendreRule r;
    r.x.assign(n, 0.0);
    r.w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    const double eps = 1e-15;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= eps) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return r;
}

const GaussLegendreRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

void append_mapped_rule(const GaussLegendreRule& rule, double a, double b,
                        std::vector<double>& xs, std::vector<double>& ws) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    for (size_t i = 0; i < rule.x.size(); ++i) {
        xs.push_back(c + h * rule.x[i]);
        ws.push_back(h * rule.w[i]);
    }
}

}  // namespace resolimit
