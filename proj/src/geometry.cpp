#include "eprb/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace eprb {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kRenormTol = 1e-6;
constexpr double kPi = 3.14159265358979323846;

} // namespace

UnitVector::UnitVector(double x, double y, double z) : x_(x), y_(y), z_(z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (std::abs(norm - 1.0) <= kUnitTol) return;
    if (std::abs(norm - 1.0) <= kRenormTol) {
        x_ /= norm;
        y_ /= norm;
        z_ /= norm;
        return;
    }
    throw std::invalid_argument("UnitVector: input norm too far from 1 to renormalize");
}

double angle_between(const UnitVector& u, const UnitVector& v) {
    const double d = std::clamp(u.dot(v), -1.0, 1.0);
    return std::acos(d);
}

UnitVector axis_in_xz_plane(double theta) {
    return UnitVector(std::sin(theta), 0.0, std::cos(theta));
}

std::pair<UnitVector, UnitVector> orthonormal_basis(const UnitVector& axis) {
    // Cross with the coordinate axis least aligned with `axis`; the result
    // has norm >= sqrt(2/3), so normalization is always well conditioned.
    const double ax = std::abs(axis.x());
    const double ay = std::abs(axis.y());
    const double az = std::abs(axis.z());
    double hx = 0.0, hy = 0.0, hz = 0.0;
    if (ax <= ay && ax <= az) {
        hx = 1.0;
    } else if (ay <= az) {
        hy = 1.0;
    } else {
        hz = 1.0;
    }
    double e1x = axis.y() * hz - axis.z() * hy;
    double e1y = axis.z() * hx - axis.x() * hz;
    double e1z = axis.x() * hy - axis.y() * hx;
    const double n = std::sqrt(e1x * e1x + e1y * e1y + e1z * e1z);
    e1x /= n;
    e1y /= n;
    e1z /= n;
    const UnitVector e1(e1x, e1y, e1z);
    const UnitVector e2(axis.y() * e1z - axis.z() * e1y,
                        axis.z() * e1x - axis.x() * e1z,
                        axis.x() * e1y - axis.y() * e1x);
    return {e1, e2};
}

UnitVector sample_uniform_sphere(RandomSource& rng) {
    const double c = 2.0 * rng.next_double() - 1.0;
    const double phi = 2.0 * kPi * rng.next_double();
    const double s = std::sqrt(1.0 - c * c);
    return UnitVector(s * std::cos(phi), s * std::sin(phi), c);
}

UnitVector sample_ring(const UnitVector& axis, int sign, RandomSource& rng) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("sample_ring: sign must be +1 or -1");
    }
    const auto [e1, e2] = orthonormal_basis(axis);
    const double phi = 2.0 * kPi * rng.next_double();
    // |lambda|^2 = (1/2)^2 + (sqrt(3)/2)^2 = 1, lambda . axis = sign/2
    const double h = 0.5 * sign;
    const double r = std::sqrt(3.0) / 2.0;
    const double cx = r * std::cos(phi);
    const double cy = r * std::sin(phi);
    return UnitVector(h * axis.x() + cx * e1.x() + cy * e2.x(),
                      h * axis.y() + cx * e1.y() + cy * e2.y(),
                      h * axis.z() + cx * e1.z() + cy * e2.z());
}

} // namespace eprb
