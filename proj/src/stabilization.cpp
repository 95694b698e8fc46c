#include "sdfem/stabilization.hpp"

#include "sdfem/errors.hpp"

#include <algorithm>
#include <limits>

namespace sdfem {

const char* to_string(DeltaVariant v) {
    return v == DeltaVariant::Standard ? "standard" : "modified";
}

DeltaVariant parse_delta_variant(const std::string& s) {
    if (s == "standard") return DeltaVariant::Standard;
    if (s == "modified") return DeltaVariant::Modified;
    throw ConfigError("unknown delta variant '" + s + "'");
}

DeltaField::DeltaField(DeltaVariant variant, double c_star, const ShishkinMesh2D& mesh)
    : variant_(variant), c_star_(c_star), N_(mesh.N()),
      lambda_x_(mesh.x_axis().lambda()), lambda_y_(mesh.y_axis().lambda()),
      H_x_(mesh.x_axis().coarse_step()), H_y_(mesh.y_axis().coarse_step()) {
    if (!(c_star > 0.0))
        throw ConfigError("c_star must be positive");
}

namespace {

double ramp(const AxisCoord& c, double lambda, double H, const char* name) {
    if (c.value < 0.0 || c.offset < lambda)
        throw DomainError(std::string(name) + " is only defined on [0, 1 - lambda]");
    return std::min(1.0, (c.offset - lambda) / H);
}

} // namespace

double DeltaField::xi(const AxisCoord& x) const { return ramp(x, lambda_x_, H_x_, "xi"); }
double DeltaField::eta(const AxisCoord& y) const { return ramp(y, lambda_y_, H_y_, "eta"); }

double DeltaField::operator()(const Point& p) const {
    if (p.x.value < 0.0 || p.x.offset < 0.0 || p.y.value < 0.0 || p.y.offset < 0.0)
        throw OutOfDomain("delta evaluated outside the unit square");
    if (p.x.offset < lambda_x_ || p.y.offset < lambda_y_)
        return 0.0;
    const double base = c_star_ / N_;
    if (variant_ == DeltaVariant::Standard)
        return base;
    return base * xi(p.x) * eta(p.y);
}

double delta(const DeltaField& field, const Point& p) { return field(p); }

double admissible_cstar(const ProblemSpec& problem, const ShishkinMesh2D& mesh) {
    const auto report = validate_problem(problem, 17);
    if (report.max_c_squared == 0.0)
        return std::numeric_limits<double>::infinity();
    return mesh.N() * problem.mu0 / (2.0 * report.max_c_squared);
}

} // namespace sdfem
