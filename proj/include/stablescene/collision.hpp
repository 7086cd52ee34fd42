#pragma once

#include "stablescene/hull.hpp"
#include "stablescene/pose.hpp"

namespace stablescene {

/// Separation distance between two posed hulls. >= 0 when disjoint,
/// exactly 0 when touching or overlapping. Symmetric.
double gjk_distance(const ConvexHull& a, const Pose& pose_a, const ConvexHull& b,
                    const Pose& pose_b);

struct ClosestPoints {
    double distance = 0.0;
    Vec3 point_a;       // witness on A (world), valid when distance > 0
    Vec3 point_b;       // witness on B (world)
    bool overlapping = false;
};

/// Distance plus witness points; used by the narrowphase for speculative contacts.
ClosestPoints gjk_closest(const ConvexHull& a, const Pose& pose_a, const ConvexHull& b,
                          const Pose& pose_b);

struct Penetration {
    double depth = 0.0; // > 0
    Vec3 normal;        // unit; translating b by depth*normal separates the pair
};

/// Penetration depth and direction for overlapping hulls (EPA). Throws
/// std::invalid_argument when the hulls are disjoint. Symmetric overlaps are
/// tie-broken toward the lowest axis index.
Penetration epa_penetration(const ConvexHull& a, const Pose& pose_a, const ConvexHull& b,
                            const Pose& pose_b);

/// Resting-contact epsilon: penetration at or below this is contact, not
/// intersection (exact face contacts from settling must not count).
inline constexpr double kContactEpsilon = 1e-5;

/// True iff the hulls overlap by more than kContactEpsilon.
bool hulls_intersect(const ConvexHull& a, const Pose& pose_a, const ConvexHull& b,
                     const Pose& pose_b);

} // namespace stablescene
