#include "sdfem/discretization.hpp"

#include "sdfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace sdfem {

std::array<double, 4> shape_values(double s, double t) {
    return {0.25 * (1.0 - s) * (1.0 - t), 0.25 * (1.0 + s) * (1.0 - t),
            0.25 * (1.0 + s) * (1.0 + t), 0.25 * (1.0 - s) * (1.0 + t)};
}

std::array<Gradient, 4> shape_gradients(double s, double t, double width_x, double width_y) {
    const double jx = 2.0 / width_x;
    const double jy = 2.0 / width_y;
    return {{{-0.25 * (1.0 - t) * jx, -0.25 * (1.0 - s) * jy},
             {0.25 * (1.0 - t) * jx, -0.25 * (1.0 + s) * jy},
             {0.25 * (1.0 + t) * jx, 0.25 * (1.0 + s) * jy},
             {-0.25 * (1.0 + t) * jx, 0.25 * (1.0 - s) * jy}}};
}

double CsrMatrix::at(int r, int c) const {
    const auto begin = col.begin() + row_ptr[r];
    const auto end = col.begin() + row_ptr[r + 1];
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return 0.0;
    return val[static_cast<std::size_t>(it - col.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
            sum += val[p] * x[col[p]];
        y[r] = sum;
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(rows);
    multiply(x, y);
    return y;
}

void write_coordinate(std::ostream& os, const CsrMatrix& A) {
    const auto old = os.precision(17);
    for (int r = 0; r < A.rows; ++r)
        for (int p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p)
            os << r << ' ' << A.col[p] << ' ' << A.val[p] << '\n';
    os.precision(old);
}

ElementContribution& ElementContribution::operator+=(const ElementContribution& o) {
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b)
            matrix[a][b] += o.matrix[a][b];
        rhs[a] += o.rhs[a];
    }
    return *this;
}

double ElementContribution::frobenius_norm() const {
    double sum = 0.0;
    for (const auto& row : matrix)
        for (double v : row) sum += v * v;
    return std::sqrt(sum);
}

ElementContribution galerkin_cell_contribution(const ShishkinMesh2D& mesh, const ProblemSpec& problem,
                                               int i, int j, const QuadratureRule& quad,
                                               const QuadratureRule& rhs_quad) {
    const double wx = mesh.x_axis().cell_width(i);
    const double wy = mesh.y_axis().cell_width(j);
    const double jac = 0.25 * wx * wy;
    const double eps = problem.epsilon;

    ElementContribution out;
    for (const auto& q : quad.nodes) {
        const Point p = mesh.map_reference(i, j, q.s, q.t);
        const auto phi = shape_values(q.s, q.t);
        const auto grad = shape_gradients(q.s, q.t, wx, wy);
        const double b1 = problem.b1(p), b2 = problem.b2(p), c = problem.c(p);
        const double w = q.weight * jac;
        for (int b = 0; b < 4; ++b) {
            const double trial = b1 * grad[b][0] + b2 * grad[b][1] + c * phi[b];
            for (int a = 0; a < 4; ++a) {
                const double diff = eps * (grad[b][0] * grad[a][0] + grad[b][1] * grad[a][1]);
                out.matrix[a][b] += w * (diff + trial * phi[a]);
            }
        }
    }
    for (const auto& q : rhs_quad.nodes) {
        const Point p = mesh.map_reference(i, j, q.s, q.t);
        const auto phi = shape_values(q.s, q.t);
        const double fw = problem.f(p) * q.weight * jac;
        for (int a = 0; a < 4; ++a)
            out.rhs[a] += fw * phi[a];
    }
    return out;
}

ElementContribution stab_cell_contribution(const ShishkinMesh2D& mesh, const ProblemSpec& problem,
                                           const DeltaField& delta, int i, int j,
                                           const QuadratureRule& quad, const QuadratureRule& rhs_quad) {
    ElementContribution out;
    if (mesh.cell_tag(i, j).region != Region::OmegaS)
        return out;

    const double wx = mesh.x_axis().cell_width(i);
    const double wy = mesh.y_axis().cell_width(j);
    const double jac = 0.25 * wx * wy;

    for (const auto& q : quad.nodes) {
        const Point p = mesh.map_reference(i, j, q.s, q.t);
        const double d = delta(p);
        if (d == 0.0) continue;
        const auto phi = shape_values(q.s, q.t);
        const auto grad = shape_gradients(q.s, q.t, wx, wy);
        const double b1 = problem.b1(p), b2 = problem.b2(p), c = problem.c(p);
        const double w = q.weight * jac * d;
        std::array<double, 4> streamline{};
        for (int a = 0; a < 4; ++a)
            streamline[a] = b1 * grad[a][0] + b2 * grad[a][1];
        for (int b = 0; b < 4; ++b) {
            const double trial = streamline[b] + c * phi[b];
            for (int a = 0; a < 4; ++a)
                out.matrix[a][b] += w * trial * streamline[a];
        }
    }
    for (const auto& q : rhs_quad.nodes) {
        const Point p = mesh.map_reference(i, j, q.s, q.t);
        const double d = delta(p);
        if (d == 0.0) continue;
        const auto grad = shape_gradients(q.s, q.t, wx, wy);
        const double fw = problem.f(p) * q.weight * jac * d;
        const double b1 = problem.b1(p), b2 = problem.b2(p);
        for (int a = 0; a < 4; ++a)
            out.rhs[a] += fw * (b1 * grad[a][0] + b2 * grad[a][1]);
    }
    return out;
}

CsrMatrix q1_pattern(int N) {
    const DofMap dofs(N);
    CsrMatrix A;
    A.rows = dofs.size();
    A.row_ptr.assign(A.rows + 1, 0);
    for (int k = 0; k < A.rows; ++k) {
        const auto [i, j] = dofs.node(k);
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const int l = dofs.index(i + di, j + dj);
                if (l != DofMap::kBoundary) A.col.push_back(l);
            }
        A.row_ptr[k + 1] = static_cast<int>(A.col.size());
    }
    A.val.assign(A.col.size(), 0.0);
    return A;
}

SparseSystem assemble_system(const ShishkinMesh2D& mesh, const ProblemSpec& problem,
                             const DeltaField& delta, const AssemblyOptions& options) {
    if (options.quad_order < 2)
        throw QuadratureOrderTooLow("assembly needs at least 2 Gauss points per direction");
    if (delta.N() != mesh.N())
        throw MeshProblemMismatch("delta field was built for a different mesh");
    const auto& xs = mesh.x_axis().spec();
    const auto& ys = mesh.y_axis().spec();
    if (xs.epsilon != problem.epsilon || ys.epsilon != problem.epsilon)
        throw MeshProblemMismatch("mesh epsilon differs from problem epsilon");
    if (xs.beta != problem.beta1 || ys.beta != problem.beta2)
        throw MeshProblemMismatch("mesh betas differ from the problem's convection bounds");

    const int N = mesh.N();
    const DofMap dofs(N);
    const QuadratureRule quad(options.quad_order);
    const QuadratureRule layer_rhs(std::max(options.quad_order, options.layer_rhs_order));

    SparseSystem sys;
    sys.N = N;
    sys.matrix = q1_pattern(N);
    sys.rhs.assign(dofs.size(), 0.0);
    auto& A = sys.matrix;

    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const bool layer = mesh.cell_tag(i, j).region != Region::OmegaS;
            const QuadratureRule& rq = layer ? layer_rhs : quad;
            auto elem = galerkin_cell_contribution(mesh, problem, i, j, quad, rq);
            elem += stab_cell_contribution(mesh, problem, delta, i, j, quad, rq);

            std::array<int, 4> g{};
            for (int a = 0; a < 4; ++a)
                g[a] = dofs.index(i + kLocalNodes[a][0], j + kLocalNodes[a][1]);
            for (int a = 0; a < 4; ++a) {
                if (g[a] == DofMap::kBoundary) continue;
                sys.rhs[g[a]] += elem.rhs[a];
                const auto row_begin = A.col.begin() + A.row_ptr[g[a]];
                const auto row_end = A.col.begin() + A.row_ptr[g[a] + 1];
                for (int b = 0; b < 4; ++b) {
                    if (g[b] == DofMap::kBoundary) continue;
                    const auto it = std::lower_bound(row_begin, row_end, g[b]);
                    A.val[static_cast<std::size_t>(it - A.col.begin())] += elem.matrix[a][b];
                }
            }
        }
    }
    return sys;
}

} // namespace sdfem
