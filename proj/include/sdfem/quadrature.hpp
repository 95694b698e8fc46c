#pragma once

#include <vector>

namespace sdfem {

/// Gauss-Legendre rule with `order` points on [-1, 1].
struct GaussRule1D {
    std::vector<double> points;
    std::vector<double> weights;
};

GaussRule1D gauss_legendre(int order);

/// Tensor product Gauss-Legendre rule on the reference square [-1, 1]^2.
struct QuadratureRule {
    struct Node {
        double s, t, weight;
    };

    int order = 0;
    std::vector<Node> nodes;

    explicit QuadratureRule(int order);
};

} // namespace sdfem
