#include "sdfem/analysis.hpp"

#include "sdfem/discretization.hpp"
#include "sdfem/errors.hpp"
#include "sdfem/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace sdfem {

DiscreteFunction::DiscreteFunction(const ShishkinMesh2D& mesh)
    : mesh_(&mesh), values_(static_cast<std::size_t>(mesh.N() + 1) * (mesh.N() + 1), 0.0) {}

DiscreteFunction DiscreteFunction::from_interior(const ShishkinMesh2D& mesh, std::span<const double> interior) {
    DiscreteFunction f(mesh);
    const DofMap dofs(mesh.N());
    if (static_cast<int>(interior.size()) != dofs.size())
        throw MeshProblemMismatch("interior vector size does not match the mesh");
    for (int k = 0; k < dofs.size(); ++k) {
        const auto [i, j] = dofs.node(k);
        f.at(i, j) = interior[k];
    }
    return f;
}

std::vector<double> DiscreteFunction::interior() const {
    const DofMap dofs(mesh_->N());
    std::vector<double> out(dofs.size());
    for (int k = 0; k < dofs.size(); ++k) {
        const auto [i, j] = dofs.node(k);
        out[k] = at(i, j);
    }
    return out;
}

double DiscreteFunction::evaluate(int i, int j, double s, double t) const {
    const auto phi = shape_values(s, t);
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += phi[a] * at(i + kLocalNodes[a][0], j + kLocalNodes[a][1]);
    return v;
}

Gradient DiscreteFunction::gradient(int i, int j, double s, double t) const {
    const auto grad = shape_gradients(s, t, mesh_->x_axis().cell_width(i), mesh_->y_axis().cell_width(j));
    Gradient g{0.0, 0.0};
    for (int a = 0; a < 4; ++a) {
        const double u = at(i + kLocalNodes[a][0], j + kLocalNodes[a][1]);
        g[0] += grad[a][0] * u;
        g[1] += grad[a][1] * u;
    }
    return g;
}

DiscreteFunction interpolant(const ProblemSpec& problem, const ShishkinMesh2D& mesh) {
    if (!problem.exact) throw NoExactSolution();
    DiscreteFunction f(mesh);
    const int N = mesh.N();
    for (int j = 0; j <= N; ++j)
        for (int i = 0; i <= N; ++i)
            f.at(i, j) = problem.exact->value({mesh.x_axis().node(i), mesh.y_axis().node(j)});
    return f;
}

const char* to_string(ErrorRegion r) {
    switch (r) {
    case ErrorRegion::Global: return "global";
    case ErrorRegion::OmegaS: return "omega_s";
    case ErrorRegion::OmegaSeps: return "omega_s_eps";
    case ErrorRegion::OmegaSepsComplement: return "omega_s_eps_c";
    case ErrorRegion::OmegaX: return "omega_x";
    case ErrorRegion::OmegaY: return "omega_y";
    case ErrorRegion::OmegaXY: return "omega_xy";
    }
    return "?";
}

ErrorRegion parse_error_region(const std::string& s) {
    for (auto r : {ErrorRegion::Global, ErrorRegion::OmegaS, ErrorRegion::OmegaSeps,
                   ErrorRegion::OmegaSepsComplement, ErrorRegion::OmegaX, ErrorRegion::OmegaY,
                   ErrorRegion::OmegaXY})
        if (s == to_string(r)) return r;
    throw UnknownRegion("unknown region '" + s + "'");
}

bool cell_in_region(const ShishkinMesh2D& mesh, int i, int j, ErrorRegion region) {
    const RegionTag tag = mesh.cell_tag(i, j);
    switch (region) {
    case ErrorRegion::Global: return true;
    case ErrorRegion::OmegaS: return tag.region == Region::OmegaS;
    case ErrorRegion::OmegaSeps: return tag.part == SmoothPart::Inner;
    case ErrorRegion::OmegaSepsComplement: return tag.part == SmoothPart::Strip;
    case ErrorRegion::OmegaX: return tag.region == Region::OmegaX;
    case ErrorRegion::OmegaY: return tag.region == Region::OmegaY;
    case ErrorRegion::OmegaXY: return tag.region == Region::OmegaXY;
    }
    throw UnknownRegion("unknown region");
}

namespace {

ErrorReport norms(const ProblemSpec& problem, const ExactSolution* exact, const DiscreteFunction& v,
                  ErrorRegion region, const DeltaField& delta, int quad_order) {
    if (quad_order < 1)
        throw QuadratureOrderTooLow("norm quadrature order must be positive");
    const auto& mesh = v.mesh();
    if (delta.N() != mesh.N())
        throw MeshProblemMismatch("delta field was built for a different mesh");
    const QuadratureRule quad(quad_order);
    const int N = mesh.N();
    const double eps = problem.epsilon;

    ErrorReport r;
    r.region = region;
    r.variant = delta.variant();
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            if (!cell_in_region(mesh, i, j, region)) continue;
            const double jac = 0.25 * mesh.cell_area(i, j);
            for (const auto& q : quad.nodes) {
                const Point p = mesh.map_reference(i, j, q.s, q.t);
                double e = -v.evaluate(i, j, q.s, q.t);
                Gradient ge = v.gradient(i, j, q.s, q.t);
                ge[0] = -ge[0];
                ge[1] = -ge[1];
                if (exact) {
                    e += exact->value(p);
                    const Gradient gu = exact->gradient(p);
                    ge[0] += gu[0];
                    ge[1] += gu[1];
                }
                const double w = q.weight * jac;
                r.components.eps_h1 += w * eps * (ge[0] * ge[0] + ge[1] * ge[1]);
                r.components.mu0_l2 += w * problem.mu0 * e * e;
                const double d = delta(p);
                if (d > 0.0) {
                    const double streamline = problem.b1(p) * ge[0] + problem.b2(p) * ge[1];
                    r.components.stab += w * d * streamline * streamline;
                }
            }
            for (const auto& node : kLocalNodes) {
                const int ni = i + node[0], nj = j + node[1];
                double e = v.at(ni, nj);
                if (exact) e -= exact->value({mesh.x_axis().node(ni), mesh.y_axis().node(nj)});
                r.max_nodal_error = std::max(r.max_nodal_error, std::abs(e));
            }
        }
    }
    const double energy = r.components.eps_h1 + r.components.mu0_l2;
    r.eps_norm = std::sqrt(energy);
    r.sd_norm = std::sqrt(energy + r.components.stab);
    return r;
}

} // namespace

ErrorReport error_norm(const ProblemSpec& problem, const DiscreteFunction& u_h, ErrorRegion region,
                       const DeltaField& delta, int quad_order) {
    if (!problem.exact) throw NoExactSolution();
    return norms(problem, &*problem.exact, u_h, region, delta, quad_order);
}

ErrorReport discrete_norm(const ProblemSpec& problem, const DiscreteFunction& v, ErrorRegion region,
                          const DeltaField& delta, int quad_order) {
    return norms(problem, nullptr, v, region, delta, quad_order);
}

namespace {

// int_0^L e^{-a xi} xi dxi = (1 - e^{-u} - u e^{-u}) / a^2 with u = a L.
double first_moment(double a, double L) {
    const double u = a * L;
    double bracket;
    if (u < 1e-3)
        bracket = u * u * (0.5 - u / 3.0 + u * u / 8.0);
    else
        bracket = -std::expm1(-u) - u * std::exp(-u);
    return bracket / (a * a);
}

// Composite 10-point Gauss for int_0^L g(xi) dxi where g decays like
// e^{-a xi}: 50 panels across the window where the integrand is
// non-negligible, 50 more across the remainder.
template <class F>
double composite_decaying(F g, double a, double L) {
    static const GaussRule1D rule = gauss_legendre(10);
    constexpr int kPanels = 50;
    auto panels = [&](double lo, double hi) {
        const double w = (hi - lo) / kPanels;
        double sum = 0.0;
        for (int k = 0; k < kPanels; ++k) {
            const double mid = lo + (k + 0.5) * w;
            for (std::size_t q = 0; q < rule.points.size(); ++q)
                sum += rule.weights[q] * 0.5 * w * g(mid + 0.5 * w * rule.points[q]);
        }
        return sum;
    };
    const double window = std::min(L, 50.0 / a);
    double total = panels(0.0, window);
    if (window < L) total += panels(window, L);
    return total;
}

} // namespace

LayerIntegrals layer_integral_oracle(double epsilon, double beta, AxisCoord x_s, AxisCoord x_t, double H) {
    const double a = 2.0 * beta / epsilon;
    const double sigma_t = x_t.offset;
    const double sigma_s = x_s.offset;
    const double ramp_len = sigma_s - sigma_t;

    LayerIntegrals out;
    // x in [0, x_s]  <=>  sigma in [sigma_s, 1]
    out.smooth_closed = (std::exp(-a * sigma_s) - std::exp(-a)) / a;
    out.smooth_quadrature = composite_decaying(
        [&](double xi) { return std::exp(-a * (sigma_s + xi)); }, a, 1.0 - sigma_s);

    // x in [x_s, x_t]  <=>  xi = sigma - sigma_t in [0, ramp_len]
    out.ramp_closed = std::exp(-a * sigma_t) * first_moment(a, ramp_len) / H;
    out.ramp_quadrature = composite_decaying(
        [&](double xi) { return std::exp(-a * (sigma_t + xi)) * xi / H; }, a, ramp_len);
    return out;
}

double rate(double e_coarse, double e_fine) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0))
        throw NonpositiveError("rates need positive errors");
    return (std::log(e_coarse) - std::log(e_fine)) / std::log(2.0);
}

std::vector<GridSample> pointwise_error_grid(const ProblemSpec& problem, const DiscreteFunction& u_h,
                                             int samples_per_cell) {
    if (!problem.exact) throw NoExactSolution();
    if (samples_per_cell < 1) throw ConfigError("samples_per_cell must be >= 1");
    const auto& mesh = u_h.mesh();
    const int N = mesh.N();
    const int S = samples_per_cell;
    std::vector<GridSample> out;
    out.reserve(static_cast<std::size_t>(N) * S * N * S);
    for (int j = 0; j < N; ++j)
        for (int b = 0; b < S; ++b) {
            const double t = -1.0 + (2.0 * b + 1.0) / S;
            for (int i = 0; i < N; ++i)
                for (int a = 0; a < S; ++a) {
                    const double s = -1.0 + (2.0 * a + 1.0) / S;
                    const Point p = mesh.map_reference(i, j, s, t);
                    const double e = problem.exact->value(p) - u_h.evaluate(i, j, s, t);
                    out.push_back({p.x, p.y, std::abs(e), mesh.cell_tag(i, j).region});
                }
        }
    return out;
}

} // namespace sdfem
