#pragma once

#include <cstddef>
#include <vector>

namespace sdfem {

/// A coordinate along one axis of the unit interval stored twice: the
/// absolute value and its distance to the outflow boundary, 1 - value.
/// Inside layer regions the offset is the primary (exact) quantity and the
/// absolute value is only a rounded convenience.
struct AxisCoord {
    double value = 0.0;
    double offset = 1.0;

    static AxisCoord from_value(double v) { return {v, 1.0 - v}; }
    static AxisCoord from_offset(double s) { return {1.0 - s, s}; }
};

struct Point {
    AxisCoord x;
    AxisCoord y;

    static Point from_values(double x, double y) {
        return {AxisCoord::from_value(x), AxisCoord::from_value(y)};
    }
};

struct AxisSpec {
    int N = 8;
    double epsilon = 1e-8;
    double beta = 1.0;
    double rho = 2.5;
};

/// Transition width rho * (epsilon / beta) * ln N.
double transition_width(const AxisSpec& spec);

/// Piecewise uniform Shishkin breakpoints on [0, 1], layer at x = 1.
///
/// Nodes 0..N/2 are coarse and stored as absolute coordinates; nodes
/// N/2..N are fine and stored as offsets sigma_i = 1 - x_i. Node N/2 is
/// present in both lists (x = 1 - lambda, sigma = lambda).
class Axis1D {
public:
    Axis1D() = default;
    explicit Axis1D(const AxisSpec& spec);

    const AxisSpec& spec() const { return spec_; }
    int N() const { return spec_.N; }
    int half() const { return spec_.N / 2; }
    double lambda() const { return lambda_; }
    double coarse_step() const { return H_; }
    double fine_step() const { return h_; }

    const std::vector<double>& coarse_points() const { return coarse_; }
    /// fine_offsets()[k] is the offset of node N/2 + k.
    const std::vector<double>& fine_offsets() const { return fine_; }

    /// Node i in the dual representation, offsets exact in both halves.
    AxisCoord node(int i) const;
    /// Width of cell [x_i, x_{i+1}]; fine widths are offset differences.
    double cell_width(int i) const;
    bool is_fine_cell(int i) const { return i >= half(); }

    /// Point inside cell i at reference coordinate t in [-1, 1].
    AxisCoord map_reference(int i, double t) const;

private:
    AxisSpec spec_;
    double lambda_ = 0.0;
    double H_ = 0.0;
    double h_ = 0.0;
    std::vector<double> coarse_;
    std::vector<double> fine_;
};

Axis1D build_axis(const AxisSpec& spec);

enum class Region { OmegaS, OmegaX, OmegaY, OmegaXY };
enum class SmoothPart { Inner, Strip, None };

struct RegionTag {
    Region region = Region::OmegaS;
    /// Inner: inside (0,x_s)x(0,y_s). Strip: the last coarse row/column of
    /// Omega_s. None for the layer regions.
    SmoothPart part = SmoothPart::None;

    bool operator==(const RegionTag&) const = default;
};

const char* to_string(Region r);

class ShishkinMesh2D {
public:
    ShishkinMesh2D(const AxisSpec& x_spec, const AxisSpec& y_spec);

    const Axis1D& x_axis() const { return x_; }
    const Axis1D& y_axis() const { return y_; }
    int N() const { return x_.N(); }
    std::size_t num_cells() const { return static_cast<std::size_t>(N()) * N(); }

    /// x_t = 1 - lambda_x and x_s = x_t - H_x, as dual coordinates.
    AxisCoord x_t() const { return x_.node(x_.half()); }
    AxisCoord x_s() const { return x_.node(x_.half() - 1); }
    AxisCoord y_t() const { return y_.node(y_.half()); }
    AxisCoord y_s() const { return y_.node(y_.half() - 1); }

    RegionTag cell_tag(int i, int j) const;
    double cell_area(int i, int j) const { return x_.cell_width(i) * y_.cell_width(j); }
    Point map_reference(int i, int j, double s, double t) const {
        return {x_.map_reference(i, s), y_.map_reference(j, t)};
    }

    /// Measure of the strip Omega_s minus (0,x_s)x(0,y_s).
    double strip_measure() const;

private:
    Axis1D x_;
    Axis1D y_;
};

ShishkinMesh2D build_mesh(const AxisSpec& x_spec, const AxisSpec& y_spec);

/// Region containing a point. Points on the interfaces x = x_t or y = y_t
/// belong to the closed Omega_s.
RegionTag classify_point(const ShishkinMesh2D& mesh, const Point& p);

} // namespace sdfem
