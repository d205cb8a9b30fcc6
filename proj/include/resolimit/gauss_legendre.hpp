#pragma once

#include <vector>

namespace resolimit {

// Gauss-Legendre rule on [-1, 1]; nodes ascending, weights positive.
struct GaussLegendreRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Cached, thread safe. Nodes found by Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(int n);

// Affine map of the reference rule to [a, b], appended to xs/ws.
void append_mapped_rule(const GaussLegendreRule& rule, double a, double b,
                        std::vector<double>& xs, std::vector<double>& ws);

}  // namespace resolimit
