#pragma once

#include <cmath>
#include <utility>

#include "eprb/rng.hpp"

namespace eprb {

/// Normalized direction in R^3. Serves both as a measurement axis and as a
/// hidden variable attached to a particle.
///
/// Construction enforces |v| = 1 within 1e-12. Inputs off by up to 1e-6 are
/// renormalized; anything farther is rejected as a caller bug.
class UnitVector {
public:
    UnitVector(double x, double y, double z);

    static UnitVector x_axis() { return UnitVector(1.0, 0.0, 0.0); }
    static UnitVector y_axis() { return UnitVector(0.0, 1.0, 0.0); }
    static UnitVector z_axis() { return UnitVector(0.0, 0.0, 1.0); }

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    double dot(const UnitVector& o) const { return x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }

    UnitVector operator-() const {
        UnitVector v = *this;
        v.x_ = -v.x_;
        v.y_ = -v.y_;
        v.z_ = -v.z_;
        return v;
    }

    friend bool operator==(const UnitVector&, const UnitVector&) = default;

private:
    double x_, y_, z_;
};

/// Angle between two unit vectors in [0, pi]. The dot product is clamped to
/// [-1, 1] so round-off near parallel/antiparallel pairs cannot escape acos.
double angle_between(const UnitVector& u, const UnitVector& v);

/// Direction at polar angle `theta` from +z, tilted toward +x.
/// The conventional plane for coplanar measurement settings.
UnitVector axis_in_xz_plane(double theta);

/// Two unit vectors completing `axis` to a right-handed orthonormal frame.
std::pair<UnitVector, UnitVector> orthonormal_basis(const UnitVector& axis);

/// Uniform draw on the unit sphere: cos(polar) uniform on [-1, 1], azimuth
/// uniform on [0, 2pi).
UnitVector sample_uniform_sphere(RandomSource& rng);

/// Draw from the circle {lambda : lambda . axis = sign/2} on the unit sphere,
/// azimuth about the axis uniform. `sign` must be +1 or -1.
UnitVector sample_ring(const UnitVector& axis, int sign, RandomSource& rng);

} // namespace eprb
