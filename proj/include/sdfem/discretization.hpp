#pragma once

#include "sdfem/mesh.hpp"
#include "sdfem/problem.hpp"
#include "sdfem/quadrature.hpp"
#include "sdfem/stabilization.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace sdfem {

// Local node order on a cell [x_i, x_{i+1}] x [y_j, y_{j+1}]:
//   0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1)
// matching reference corners (-1,-1), (1,-1), (1,1), (-1,1).
inline constexpr std::array<std::array<int, 2>, 4> kLocalNodes{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};

std::array<double, 4> shape_values(double s, double t);

/// Physical gradients of the four bilinear basis functions for a cell with
/// the given widths.
std::array<Gradient, 4> shape_gradients(double s, double t, double width_x, double width_y);

/// Lexicographic numbering of interior nodes, k = (j-1)(N-1) + (i-1).
class DofMap {
public:
    static constexpr int kBoundary = -1;

    explicit DofMap(int N) : N_(N) {}

    int N() const { return N_; }
    int size() const { return (N_ - 1) * (N_ - 1); }
    int index(int i, int j) const {
        if (i <= 0 || j <= 0 || i >= N_ || j >= N_) return kBoundary;
        return (j - 1) * (N_ - 1) + (i - 1);
    }
    std::array<int, 2> node(int k) const { return {k % (N_ - 1) + 1, k / (N_ - 1) + 1}; }

private:
    int N_;
};

/// Compressed sparse row matrix with sorted column indices.
struct CsrMatrix {
    int rows = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    std::size_t nnz() const { return val.size(); }
    /// Entry (r, c); zero if outside the stored pattern.
    double at(int r, int c) const;
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;
};

/// Writes "row col value" lines (0-based).
void write_coordinate(std::ostream& os, const CsrMatrix& A);

struct SparseSystem {
    int N = 0;
    CsrMatrix matrix;
    std::vector<double> rhs;

    int dimension() const { return matrix.rows; }
};

struct ElementContribution {
    std::array<std::array<double, 4>, 4> matrix{};  // [test][trial]
    std::array<double, 4> rhs{};

    ElementContribution& operator+=(const ElementContribution& o);
    double frobenius_norm() const;
};

struct AssemblyOptions {
    int quad_order = 3;
    /// Order for the load vector in layer cells, where f carries the layer
    /// exponentials.
    int layer_rhs_order = 5;
};

/// eps (grad phi_l, grad phi_k) + (b . grad phi_l + c phi_l, phi_k) on one
/// cell, and (f, phi_k).
ElementContribution galerkin_cell_contribution(const ShishkinMesh2D& mesh, const ProblemSpec& problem,
                                               int i, int j, const QuadratureRule& quad,
                                               const QuadratureRule& rhs_quad);

/// (b . grad phi_l + c phi_l, delta b . grad phi_k) and (f, delta b . grad
/// phi_k) on one cell. The -eps Laplace term vanishes for bilinears. Layer
/// cells return zero without evaluating anything.
ElementContribution stab_cell_contribution(const ShishkinMesh2D& mesh, const ProblemSpec& problem,
                                           const DeltaField& delta, int i, int j,
                                           const QuadratureRule& quad, const QuadratureRule& rhs_quad);

/// Assembles the reduced SDFEM system over interior nodes. Cells are
/// visited in lexicographic order and accumulated serially, so the output
/// is bit-reproducible.
SparseSystem assemble_system(const ShishkinMesh2D& mesh, const ProblemSpec& problem,
                             const DeltaField& delta, const AssemblyOptions& options = {});

/// Sparsity pattern of the Q1 stencil, values zeroed.
CsrMatrix q1_pattern(int N);

} // namespace sdfem
