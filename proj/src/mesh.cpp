#include "sdfem/mesh.hpp"

#include "sdfem/errors.hpp"

#include <cmath>
#include <string>

namespace sdfem {

namespace {

void validate(const AxisSpec& spec) {
    if (spec.N < 4 || spec.N % 2 != 0)
        throw InvalidSpec("N must be an even integer >= 4, got " + std::to_string(spec.N));
    if (!(spec.epsilon > 0.0))
        throw InvalidSpec("epsilon must be positive");
    if (spec.epsilon > 1.0 / spec.N)
        throw InvalidSpec("epsilon must not exceed 1/N");
    if (!(spec.beta > 0.0))
        throw InvalidSpec("beta must be positive");
    if (!(spec.rho > 0.0))
        throw InvalidSpec("rho must be positive");
    const double lambda = transition_width(spec);
    if (!(lambda < 0.5))
        throw InvalidSpec("transition width lambda = " + std::to_string(lambda) +
                          " must be below 1/2");
}

} // namespace

double transition_width(const AxisSpec& spec) {
    // Extended precision so the result carries a single rounding.
    const long double l = static_cast<long double>(spec.rho) *
                          (static_cast<long double>(spec.epsilon) / static_cast<long double>(spec.beta)) *
                          std::log(static_cast<long double>(spec.N));
    return static_cast<double>(l);
}

Axis1D::Axis1D(const AxisSpec& spec) : spec_(spec) {
    validate(spec);
    const int N = spec.N;
    const int half = N / 2;
    lambda_ = transition_width(spec);
    H_ = (1.0 - lambda_) / half;
    h_ = lambda_ / half;

    coarse_.resize(half + 1);
    for (int i = 0; i < half; ++i)
        coarse_[i] = 2.0 * i * (1.0 - lambda_) / N;
    coarse_[half] = 1.0 - lambda_;

    fine_.resize(half + 1);
    for (int i = half; i <= N; ++i)
        fine_[i - half] = 2.0 * (N - i) * lambda_ / N;
    fine_[0] = lambda_;
}

AxisCoord Axis1D::node(int i) const {
    const int hf = half();
    if (i <= hf) {
        // 1 - x_i = (N/2 - i) H + lambda, formed without cancellation.
        return {coarse_[i], (hf - i) * H_ + lambda_};
    }
    return AxisCoord::from_offset(fine_[i - hf]);
}

double Axis1D::cell_width(int i) const {
    const int hf = half();
    if (i < hf)
        return coarse_[i + 1] - coarse_[i];
    return fine_[i - hf] - fine_[i + 1 - hf];
}

AxisCoord Axis1D::map_reference(int i, double t) const {
    const double w = cell_width(i);
    const double right_offset = node(i + 1).offset;
    const double offset = right_offset + 0.5 * (1.0 - t) * w;
    if (is_fine_cell(i))
        return AxisCoord::from_offset(offset);
    return {coarse_[i] + 0.5 * (1.0 + t) * w, offset};
}

Axis1D build_axis(const AxisSpec& spec) { return Axis1D(spec); }

const char* to_string(Region r) {
    switch (r) {
    case Region::OmegaS: return "OmegaS";
    case Region::OmegaX: return "OmegaX";
    case Region::OmegaY: return "OmegaY";
    case Region::OmegaXY: return "OmegaXY";
    }
    return "?";
}

ShishkinMesh2D::ShishkinMesh2D(const AxisSpec& x_spec, const AxisSpec& y_spec)
    : x_(x_spec), y_(y_spec) {
    if (x_spec.N != y_spec.N)
        throw InvalidSpec("both axes must use the same N");
}

RegionTag ShishkinMesh2D::cell_tag(int i, int j) const {
    const int hf = x_.half();
    const bool fx = i >= hf;
    const bool fy = j >= hf;
    if (fx && fy) return {Region::OmegaXY, SmoothPart::None};
    if (fx) return {Region::OmegaX, SmoothPart::None};
    if (fy) return {Region::OmegaY, SmoothPart::None};
    const bool inner = i < hf - 1 && j < hf - 1;
    return {Region::OmegaS, inner ? SmoothPart::Inner : SmoothPart::Strip};
}

double ShishkinMesh2D::strip_measure() const {
    return x_t().value * y_t().value - x_s().value * y_s().value;
}

ShishkinMesh2D build_mesh(const AxisSpec& x_spec, const AxisSpec& y_spec) {
    return ShishkinMesh2D(x_spec, y_spec);
}

RegionTag classify_point(const ShishkinMesh2D& mesh, const Point& p) {
    auto inside = [](const AxisCoord& c) {
        return c.value >= 0.0 && c.value <= 1.0 && c.offset >= 0.0 && c.offset <= 1.0;
    };
    if (!inside(p.x) || !inside(p.y))
        throw OutOfDomain("point outside the unit square");

    const double lx = mesh.x_axis().lambda();
    const double ly = mesh.y_axis().lambda();
    const bool layer_x = p.x.offset < lx;
    const bool layer_y = p.y.offset < ly;
    if (layer_x && layer_y) return {Region::OmegaXY, SmoothPart::None};
    if (layer_x) return {Region::OmegaX, SmoothPart::None};
    if (layer_y) return {Region::OmegaY, SmoothPart::None};

    const bool inner = p.x.offset > mesh.x_s().offset && p.y.offset > mesh.y_s().offset;
    return {Region::OmegaS, inner ? SmoothPart::Inner : SmoothPart::Strip};
}

} // namespace sdfem
