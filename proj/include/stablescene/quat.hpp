#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "stablescene/vec3.hpp"

namespace stablescene {

/// Unit quaternion (w, x, y, z). Construction never normalizes silently;
/// use normalize() or the named factories.
struct UnitQuat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    constexpr UnitQuat() = default;
    constexpr UnitQuat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static UnitQuat identity() { return {}; }

    static UnitQuat from_axis_angle(const Vec3& axis, double angle) {
        const Vec3 a = normalized(axis);
        const double h = 0.5 * angle;
        const double s = std::sin(h);
        return {std::cos(h), a.x * s, a.y * s, a.z * s};
    }

    /// Exponential map of an axis-scaled rotation vector (rad).
    static UnitQuat exp_map(const Vec3& rotvec) {
        const double angle = stablescene::norm(rotvec);
        if (angle < 1e-12) {
            // first-order expansion keeps the map smooth through zero
            UnitQuat q{1.0, 0.5 * rotvec.x, 0.5 * rotvec.y, 0.5 * rotvec.z};
            return q.normalize();
        }
        return from_axis_angle(rotvec, angle);
    }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    UnitQuat normalize() const {
        const double n = norm();
        // already-unit values pass through bit-identically (keeps
        // save/load/save byte-stable)
        if (std::abs(n - 1.0) <= 1e-12) return *this;
        return {w / n, x / n, y / n, z / n};
    }

    bool is_unit(double tol = 1e-6) const { return std::abs(norm() - 1.0) <= tol; }

    UnitQuat conjugate() const { return {w, -x, -y, -z}; }

    /// Hemisphere canonicalization: w >= 0, tie broken by first nonzero
    /// vector component positive. Used for serialization.
    UnitQuat canonical() const {
        bool flip = w < 0.0;
        if (w == 0.0) {
            if (x != 0.0) flip = x < 0.0;
            else if (y != 0.0) flip = y < 0.0;
            else flip = z < 0.0;
        }
        return flip ? UnitQuat{-w, -x, -y, -z} : *this;
    }

    Vec3 rotate(const Vec3& v) const {
        // q v q* via the rotated-cross expansion
        const Vec3 u{x, y, z};
        const Vec3 t = 2.0 * cross(u, v);
        return v + w * t + cross(u, t);
    }

    std::array<std::array<double, 3>, 3> to_matrix() const {
        const double xx = x * x, yy = y * y, zz = z * z;
        const double xy = x * y, xz = x * z, yz = y * z;
        const double wx = w * x, wy = w * y, wz = w * z;
        return {{{1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy)},
                 {2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx)},
                 {2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy)}}};
    }
};

inline UnitQuat operator*(const UnitQuat& a, const UnitQuat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline double dot(const UnitQuat& a, const UnitQuat& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Geodesic distance on SO(3): 2*acos(|<a,b>|), range [0, pi]. Invariant to
/// sign flips of either argument. Evaluated through atan2 so that nearly
/// identical rotations come out at ~1e-16 rather than the ~1e-8 the naive
/// acos form loses to rounding.
inline double geodesic_distance(const UnitQuat& a, const UnitQuat& b) {
    if (!a.is_unit() || !b.is_unit())
        throw std::invalid_argument("geodesic_distance: non-unit quaternion input");
    UnitQuat bs = b;
    if (dot(a, b) < 0.0) bs = UnitQuat{-b.w, -b.x, -b.y, -b.z};
    const double dm = std::sqrt((a.w - bs.w) * (a.w - bs.w) + (a.x - bs.x) * (a.x - bs.x) +
                                (a.y - bs.y) * (a.y - bs.y) + (a.z - bs.z) * (a.z - bs.z));
    const double dp = std::sqrt((a.w + bs.w) * (a.w + bs.w) + (a.x + bs.x) * (a.x + bs.x) +
                                (a.y + bs.y) * (a.y + bs.y) + (a.z + bs.z) * (a.z + bs.z));
    return 4.0 * std::atan2(dm, dp);
}

} // namespace stablescene
