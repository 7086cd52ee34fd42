#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stablescene/aabb.hpp"
#include "stablescene/pose.hpp"
#include "stablescene/vec3.hpp"

namespace stablescene {

/// Plane in Hessian form: dot(normal, p) <= offset inside.
struct FacePlane {
    Vec3 normal;
    double offset = 0.0;

    double signed_distance(const Vec3& p) const { return dot(normal, p) - offset; }
};

/// A polygonal face of a convex hull: coplanar triangles merged into one
/// convex loop, wound counter-clockwise seen from outside.
struct HullFace {
    FacePlane plane;
    std::vector<int> loop; // vertex indices, CCW from outside
};

/// Convex polyhedron in body frame. Triangles are wound outward; merged
/// faces are derived at construction for contact clipping.
struct ConvexHull {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<HullFace> faces;
    Vec3 centroid;
    double volume = 0.0;

    /// Farthest vertex index along a body-frame direction.
    int support_index(const Vec3& dir) const;
    Vec3 support(const Vec3& dir) const { return vertices[size_t(support_index(dir))]; }

    Aabb local_aabb() const;

    /// True when p is inside or on the hull within tol.
    bool contains(const Vec3& p, double tol = 1e-9) const;

    /// Largest signed distance of p to any face plane (< 0 strictly inside).
    double max_plane_distance(const Vec3& p) const;

    /// Inertia tensor about the centroid for the given total mass, assuming
    /// uniform density. Row-major 3x3.
    std::array<std::array<double, 3>, 3> unit_inertia(double mass) const;
};

/// Quickhull over >= 4 non-coplanar points (coplanarity tolerance 1e-9 m).
/// Throws DegenerateGeometry on degenerate input. Interior points are
/// discarded; faces are wound outward.
ConvexHull convex_hull(const std::vector<Vec3>& points);

/// Tight AABB of the posed hull vertices.
Aabb aabb_of(const ConvexHull& hull, const Pose& pose);

} // namespace stablescene
