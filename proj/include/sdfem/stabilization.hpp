#pragma once

#include "sdfem/mesh.hpp"
#include "sdfem/problem.hpp"

namespace sdfem {

enum class DeltaVariant { Standard, Modified };

const char* to_string(DeltaVariant v);
DeltaVariant parse_delta_variant(const std::string& s);

/// Streamline diffusion weight delta(x, y).
///
/// Standard: c_star / N on the closed coarse region Omega_s, zero elsewhere.
/// Modified: c_star / N * xi(x) * eta(y) on Omega_s, where xi and eta ramp
/// linearly from 1 at x_s (y_s) down to 0 at x_t (y_t). Both vanish in the
/// layer regions. The ramps are evaluated in offset space,
/// xi = (sigma_x - lambda_x) / H_x, so they stay exact for tiny lambda.
class DeltaField {
public:
    DeltaField(DeltaVariant variant, double c_star, const ShishkinMesh2D& mesh);

    DeltaVariant variant() const { return variant_; }
    double c_star() const { return c_star_; }
    int N() const { return N_; }
    double max_value() const { return c_star_ / N_; }

    double xi(const AxisCoord& x) const;
    double eta(const AxisCoord& y) const;
    double xi(double x) const { return xi(AxisCoord::from_value(x)); }
    double eta(double y) const { return eta(AxisCoord::from_value(y)); }

    double operator()(const Point& p) const;

private:
    DeltaVariant variant_;
    double c_star_;
    int N_;
    double lambda_x_, lambda_y_;
    double H_x_, H_y_;
};

double delta(const DeltaField& field, const Point& p);

/// Largest c_star for which delta <= c_star/N satisfies the sufficient
/// coercivity condition delta <= mu0 / (2 max c^2), so that
/// a_SD(v, v) >= ||v||_SD^2 / 2 on the discrete space. Returns +infinity when
/// c vanishes identically.
double admissible_cstar(const ProblemSpec& problem, const ShishkinMesh2D& mesh);

} // namespace sdfem
