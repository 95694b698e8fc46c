#include "sdfem/problem.hpp"

#include "sdfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdfem {

namespace {

// Layer factors of the benchmark solution, evaluated from offsets so that
// e^{-2 sigma/eps} never sees a cancelled 1 - x.
struct BenchmarkTerms {
    double s, co;      // sin x, cos x
    double y;
    double ex, ey;     // e^{-2 sigma_x / eps}, e^{-sigma_y / eps}
    double X, Y;       // 1 - ex, 1 - ey

    BenchmarkTerms(double eps, const Point& p)
        : s(std::sin(p.x.value)), co(std::cos(p.x.value)), y(p.y.value),
          ex(std::exp(-2.0 * p.x.offset / eps)), ey(std::exp(-p.y.offset / eps)),
          X(-std::expm1(-2.0 * p.x.offset / eps)), Y(-std::expm1(-p.y.offset / eps)) {}
};

double benchmark_value(double eps, const Point& p) {
    const BenchmarkTerms t(eps, p);
    return 2.0 * t.s * t.X * t.y * t.y * t.Y;
}

Gradient benchmark_gradient(double eps, const Point& p) {
    const BenchmarkTerms t(eps, p);
    // u = g(x) k(y), g = 2 sin x X, k = y^2 Y
    const double g = 2.0 * t.s * t.X;
    const double dg = 2.0 * t.co * t.X - 4.0 * t.s * t.ex / eps;
    const double k = t.y * t.y * t.Y;
    const double dk = 2.0 * t.y * t.Y - t.y * t.y * t.ey / eps;
    return {dg * k, g * dk};
}

// f = k (-eps g'' + 2 g' + g) + g (-eps k'' + k'). The O(1/eps) layer terms
// cancel exactly in both brackets and are removed by hand:
//   -eps g'' + 2 g' + g = X (2 eps sin x + 4 cos x + 2 sin x) + 8 cos x ex
//   -eps k'' + k'       = Y (2 y - 2 eps) + 4 y ey
double benchmark_source(double eps, const Point& p) {
    const BenchmarkTerms t(eps, p);
    const double g = 2.0 * t.s * t.X;
    const double k = t.y * t.y * t.Y;
    const double ax = t.X * (2.0 * eps * t.s + 4.0 * t.co + 2.0 * t.s) + 8.0 * t.co * t.ex;
    const double by = t.Y * (2.0 * t.y - 2.0 * eps) + 4.0 * t.y * t.ey;
    return k * ax + g * by;
}

ScalarField constant(double v) {
    return [v](const Point&) { return v; };
}

double divergence(const ProblemSpec& p, const Point& pt) {
    if (p.div_b) return p.div_b(pt);
    const double step = 1e-6;
    auto shifted = [](const AxisCoord& c, double d) {
        const double v = std::clamp(c.value + d, 0.0, 1.0);
        return AxisCoord::from_value(v);
    };
    const double xp = std::min(pt.x.value + step, 1.0), xm = std::max(pt.x.value - step, 0.0);
    const double yp = std::min(pt.y.value + step, 1.0), ym = std::max(pt.y.value - step, 0.0);
    const double db1 = (p.b1({shifted(pt.x, step), pt.y}) - p.b1({shifted(pt.x, -step), pt.y})) / (xp - xm);
    const double db2 = (p.b2({pt.x, shifted(pt.y, step)}) - p.b2({pt.x, shifted(pt.y, -step)})) / (yp - ym);
    return db1 + db2;
}

} // namespace

ProblemSpec benchmark_problem(double epsilon) {
    if (!(epsilon > 0.0))
        throw InvalidSpec("epsilon must be positive");
    ProblemSpec p;
    p.name = "paper-benchmark";
    p.epsilon = epsilon;
    p.b1 = constant(2.0);
    p.b2 = constant(1.0);
    p.c = constant(1.0);
    p.div_b = constant(0.0);
    p.f = [epsilon](const Point& pt) { return benchmark_source(epsilon, pt); };
    p.beta1 = 2.0;
    p.beta2 = 1.0;
    p.mu0 = 1.0;
    p.exact = ExactSolution{
        [epsilon](const Point& pt) { return benchmark_value(epsilon, pt); },
        [epsilon](const Point& pt) { return benchmark_gradient(epsilon, pt); },
    };
    return p;
}

std::vector<std::string> problem_names() { return {"paper-benchmark"}; }

ProblemSpec make_problem(const std::string& name, double epsilon) {
    if (name == "paper-benchmark")
        return benchmark_problem(epsilon);
    throw ConfigError("unknown problem '" + name + "'");
}

double eval_exact(const ProblemSpec& p, const Point& pt) {
    if (!p.exact) throw NoExactSolution();
    return p.exact->value(pt);
}

Gradient eval_exact_gradient(const ProblemSpec& p, const Point& pt) {
    if (!p.exact) throw NoExactSolution();
    return p.exact->gradient(pt);
}

double eval_source(const ProblemSpec& p, const Point& pt) { return p.f(pt); }

ValidationReport validate_problem(const ProblemSpec& p, int sample_density) {
    if (sample_density < 2)
        throw ConfigError("sample_density must be at least 2");

    std::vector<double> samples;
    const double step = 1.0 / (sample_density - 1);
    const double g = std::sqrt(0.6);
    const double gauss[3] = {-g, 0.0, g};
    for (int i = 0; i < sample_density; ++i) {
        samples.push_back(i * step);
        if (i + 1 < sample_density)
            for (double t : gauss)
                samples.push_back((i + 0.5 * (1.0 + t)) * step);
    }

    ValidationReport r;
    r.beta1 = {p.beta1, std::numeric_limits<double>::infinity(), false};
    r.beta2 = {p.beta2, std::numeric_limits<double>::infinity(), false};
    r.mu0 = {p.mu0, std::numeric_limits<double>::infinity(), false};
    for (double x : samples) {
        for (double y : samples) {
            const Point pt = Point::from_values(x, y);
            const double c = p.c(pt);
            r.beta1.sampled_min = std::min(r.beta1.sampled_min, p.b1(pt));
            r.beta2.sampled_min = std::min(r.beta2.sampled_min, p.b2(pt));
            r.mu0.sampled_min = std::min(r.mu0.sampled_min, c - 0.5 * divergence(p, pt));
            r.max_c_squared = std::max(r.max_c_squared, c * c);
        }
    }
    r.beta1.pass = p.beta1 > 0.0 && r.beta1.sampled_min >= p.beta1;
    r.beta2.pass = p.beta2 > 0.0 && r.beta2.sampled_min >= p.beta2;
    r.mu0.pass = p.mu0 > 0.0 && r.mu0.sampled_min >= p.mu0;
    return r;
}

} // namespace sdfem
