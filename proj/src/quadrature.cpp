#include "sdfem/quadrature.hpp"

#include "sdfem/errors.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace sdfem {

GaussRule1D gauss_legendre(int order) {
    if (order < 1)
        throw QuadratureOrderTooLow("quadrature order must be positive");
    GaussRule1D rule;
    rule.points.resize(order);
    rule.weights.resize(order);
    const int n = order;
    // P_n(x) and P_n'(x) by the three-term recurrence.
    auto legendre = [n](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.points[n / 2] = 0.0;
    return rule;
}

QuadratureRule::QuadratureRule(int q) : order(q) {
    const auto g = gauss_legendre(q);
    nodes.reserve(static_cast<std::size_t>(q) * q);
    for (int b = 0; b < q; ++b)
        for (int a = 0; a < q; ++a)
            nodes.push_back({g.points[a], g.points[b], g.weights[a] * g.weights[b]});
}

} // namespace sdfem
