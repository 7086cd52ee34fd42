#pragma once

#include <limits>

#include "stablescene/vec3.hpp"

namespace stablescene {

struct Aabb {
    Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    bool empty() const { return min.x > max.x || min.y > max.y || min.z > max.z; }

    void extend(const Vec3& p) {
        min = cwise_min(min, p);
        max = cwise_max(max, p);
    }

    void extend(const Aabb& o) {
        min = cwise_min(min, o.min);
        max = cwise_max(max, o.max);
    }

    Aabb inflated(double r) const { return {min - Vec3{r, r, r}, max + Vec3{r, r, r}}; }

    bool overlaps(const Aabb& o) const {
        return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y &&
               min.z <= o.max.z && o.min.z <= max.z;
    }

    bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }

    Vec3 extent() const { return max - min; }

    double volume() const {
        if (empty()) return 0.0;
        const Vec3 e = extent();
        return e.x * e.y * e.z;
    }
};

/// Overlap volume of two boxes; 0 when disjoint.
inline double intersection_volume(const Aabb& a, const Aabb& b) {
    const double dx = std::min(a.max.x, b.max.x) - std::max(a.min.x, b.min.x);
    const double dy = std::min(a.max.y, b.max.y) - std::max(a.min.y, b.min.y);
    const double dz = std::min(a.max.z, b.max.z) - std::max(a.min.z, b.min.z);
    if (dx <= 0.0 || dy <= 0.0 || dz <= 0.0) return 0.0;
    return dx * dy * dz;
}

inline double aabb_iou(const Aabb& a, const Aabb& b) {
    const double inter = intersection_volume(a, b);
    const double uni = a.volume() + b.volume() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

} // namespace stablescene
