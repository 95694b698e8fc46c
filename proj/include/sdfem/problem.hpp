#pragma once

#include "sdfem/mesh.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sdfem {

using ScalarField = std::function<double(const Point&)>;
using Gradient = std::array<double, 2>;

struct ExactSolution {
    ScalarField value;
    std::function<Gradient(const Point&)> gradient;
};

/// -eps Laplace(u) + b . grad(u) + c u = f on the unit square, u = 0 on the
/// boundary. beta1, beta2 and mu0 are the declared lower bounds of b1, b2
/// and c - div(b)/2.
struct ProblemSpec {
    std::string name;
    double epsilon = 1e-8;
    ScalarField b1;
    ScalarField b2;
    ScalarField c;
    ScalarField f;
    /// Divergence of b; central differences are used when left empty.
    ScalarField div_b;
    double beta1 = 1.0;
    double beta2 = 1.0;
    double mu0 = 1.0;
    std::optional<ExactSolution> exact;
};

/// -eps Laplace(u) + 2 u_x + u_y + u = f with
/// u = 2 sin x (1 - e^{-2(1-x)/eps}) y^2 (1 - e^{-(1-y)/eps}).
ProblemSpec benchmark_problem(double epsilon);

/// Problems selectable by name from the CLI.
ProblemSpec make_problem(const std::string& name, double epsilon);
std::vector<std::string> problem_names();

double eval_exact(const ProblemSpec& p, const Point& pt);
Gradient eval_exact_gradient(const ProblemSpec& p, const Point& pt);
double eval_source(const ProblemSpec& p, const Point& pt);

struct BoundCheck {
    double declared = 0.0;
    double sampled_min = 0.0;
    bool pass = false;
};

struct ValidationReport {
    BoundCheck beta1;
    BoundCheck beta2;
    BoundCheck mu0;
    double max_c_squared = 0.0;

    bool ok() const { return beta1.pass && beta2.pass && mu0.pass; }
};

/// Samples a (density x density) grid of the closed square plus 3x3 Gauss
/// points in each of its cells and compares against the declared bounds.
ValidationReport validate_problem(const ProblemSpec& p, int sample_density);

} // namespace sdfem
