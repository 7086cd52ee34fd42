#pragma once

#include "stablescene/quat.hpp"
#include "stablescene/vec3.hpp"

namespace stablescene {

/// 6-DoF rigid pose: world point = rotation * body point + translation.
struct Pose {
    UnitQuat rotation;
    Vec3 translation;

    static Pose identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation.rotate(p) + translation; }

    Pose inverse() const {
        const UnitQuat ri = rotation.conjugate();
        return {ri, -ri.rotate(translation)};
    }
};

/// Composition: (a * b).apply(p) == a.apply(b.apply(p)).
inline Pose operator*(const Pose& a, const Pose& b) {
    return {(a.rotation * b.rotation).normalize(), a.rotation.rotate(b.translation) + a.translation};
}

} // namespace stablescene
