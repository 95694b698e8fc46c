#pragma once

#include "sdfem/mesh.hpp"
#include "sdfem/problem.hpp"
#include "sdfem/stabilization.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdfem {

/// Piecewise bilinear function given by its values at all (N+1)^2 nodes.
/// Holds a pointer to the mesh, which must outlive it.
class DiscreteFunction {
public:
    explicit DiscreteFunction(const ShishkinMesh2D& mesh);

    /// Embeds a vector of interior unknowns, boundary values zero.
    static DiscreteFunction from_interior(const ShishkinMesh2D& mesh, std::span<const double> interior);

    const ShishkinMesh2D& mesh() const { return *mesh_; }
    double& at(int i, int j) { return values_[index(i, j)]; }
    double at(int i, int j) const { return values_[index(i, j)]; }
    const std::vector<double>& values() const { return values_; }

    /// Interior unknowns in DofMap order.
    std::vector<double> interior() const;

    double evaluate(int i, int j, double s, double t) const;
    Gradient gradient(int i, int j, double s, double t) const;

private:
    const ShishkinMesh2D* mesh_;
    std::vector<double> values_;

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * (mesh_->N() + 1) + i;
    }
};

/// Nodal interpolant of the exact solution, evaluated through offsets.
DiscreteFunction interpolant(const ProblemSpec& problem, const ShishkinMesh2D& mesh);

enum class ErrorRegion { Global, OmegaS, OmegaSeps, OmegaSepsComplement, OmegaX, OmegaY, OmegaXY };

const char* to_string(ErrorRegion r);
ErrorRegion parse_error_region(const std::string& s);
bool cell_in_region(const ShishkinMesh2D& mesh, int i, int j, ErrorRegion region);

struct NormComponents {
    double eps_h1 = 0.0;  // eps |v|_1^2
    double mu0_l2 = 0.0;  // mu0 ||v||^2
    double stab = 0.0;    // sum_K ||delta^{1/2} b . grad v||_K^2
};

struct ErrorReport {
    ErrorRegion region = ErrorRegion::Global;
    DeltaVariant variant = DeltaVariant::Standard;
    double eps_norm = 0.0;
    double sd_norm = 0.0;
    NormComponents components;
    double max_nodal_error = 0.0;
};

/// Energy and SD norms of u - u_h restricted to a cell-aligned region, by
/// tensor Gauss quadrature of the given order on every cell.
ErrorReport error_norm(const ProblemSpec& problem, const DiscreteFunction& u_h, ErrorRegion region,
                       const DeltaField& delta, int quad_order = 5);

/// Same norms of a discrete function itself (no exact solution involved).
ErrorReport discrete_norm(const ProblemSpec& problem, const DiscreteFunction& v, ErrorRegion region,
                          const DeltaField& delta, int quad_order = 5);

/// Closed forms and composite Gauss values of
///   smooth: int_0^{x_s} e^{-2 beta (1-x)/eps} dx
///   ramp:   int_{x_s}^{x_t} e^{-2 beta (1-x)/eps} (x_t - x)/H dx
/// evaluated in offset coordinates.
struct LayerIntegrals {
    double smooth_closed = 0.0;
    double smooth_quadrature = 0.0;
    double ramp_closed = 0.0;
    double ramp_quadrature = 0.0;
};

LayerIntegrals layer_integral_oracle(double epsilon, double beta, AxisCoord x_s, AxisCoord x_t, double H);

/// Convergence rate (ln e_coarse - ln e_fine) / ln 2.
double rate(double e_coarse, double e_fine);

struct GridSample {
    AxisCoord x;
    AxisCoord y;
    double abs_error = 0.0;
    Region region = Region::OmegaS;
};

/// |u - u_h| at samples_per_cell^2 cell-interior points per cell, rows of
/// constant y ordered bottom to top, x increasing within a row.
std::vector<GridSample> pointwise_error_grid(const ProblemSpec& problem, const DiscreteFunction& u_h,
                                             int samples_per_cell);

} // namespace sdfem
