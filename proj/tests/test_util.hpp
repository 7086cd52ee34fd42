#pragma once

// Shared test helpers: random geometry generators and the sampling-based
// oracles the suites check the implementation against. Everything here is
// deliberately independent of the collision/simulation code paths it is
// used to verify (plane containment tests and brute-force loops only).

#include <array>
#include <cmath>
#include <vector>

#include "stablescene/collision.hpp"
#include "stablescene/hull.hpp"
#include "stablescene/pose.hpp"
#include "stablescene/rng.hpp"
#include "stablescene/scene.hpp"

namespace testutil {

using namespace stablescene;

inline UnitQuat random_quat(Rng& rng) {
    UnitQuat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    return q.normalize();
}

inline Vec3 random_vec(Rng& rng, double lo, double hi) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline std::vector<Vec3> box_points(double sx, double sy, double sz) {
    std::vector<Vec3> pts;
    for (int ix : {-1, 1})
        for (int iy : {-1, 1})
            for (int iz : {-1, 1}) pts.push_back({0.5 * ix * sx, 0.5 * iy * sy, 0.5 * iz * sz});
    return pts;
}

inline ConvexHull unit_cube() { return convex_hull(box_points(1, 1, 1)); }

inline ConvexHull random_ball_hull(Rng& rng, int n_points, double radius) {
    std::vector<Vec3> pts;
    for (int i = 0; i < n_points; ++i) {
        Vec3 p;
        do {
            p = random_vec(rng, -radius, radius);
        } while (norm(p) > radius);
        pts.push_back(p);
    }
    return convex_hull(pts);
}

// 3x3 rotation matrix oracle for the quaternion geodesic distance.
inline double trace_formula_distance(const UnitQuat& a, const UnitQuat& b) {
    const auto ra = a.to_matrix();
    const auto rb = b.to_matrix();
    // tr(Ra^T Rb)
    double tr = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) tr += ra[size_t(k)][size_t(i)] * rb[size_t(k)][size_t(i)];
    const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

// Uniform point inside the tetrahedron (a, b, c, d) by cube folding.
inline Vec3 sample_tetrahedron(Rng& rng, const Vec3& a, const Vec3& b, const Vec3& c,
                               const Vec3& d) {
    double s = rng.uniform(), t = rng.uniform(), u = rng.uniform();
    if (s + t > 1.0) {
        s = 1.0 - s;
        t = 1.0 - t;
    }
    if (t + u > 1.0) {
        const double tmp = u;
        u = 1.0 - s - t;
        t = 1.0 - tmp;
    } else if (s + t + u > 1.0) {
        const double tmp = u;
        u = s + t + u - 1.0;
        s = 1.0 - t - tmp;
    }
    return a + s * (b - a) + t * (c - a) + u * (d - a);
}

// Uniform sample inside a convex hull via centroid-fan tetrahedra.
class HullSampler {
public:
    explicit HullSampler(const ConvexHull& hull) : hull_(hull) {
        double acc = 0.0;
        for (const auto& tri : hull.triangles) {
            const Vec3 a = hull.vertices[size_t(tri[0])] - hull.centroid;
            const Vec3 b = hull.vertices[size_t(tri[1])] - hull.centroid;
            const Vec3 c = hull.vertices[size_t(tri[2])] - hull.centroid;
            acc += std::abs(dot(a, cross(b, c))) / 6.0;
            cumulative_.push_back(acc);
        }
        total_ = acc;
    }

    Vec3 sample(Rng& rng) const {
        const double target = rng.uniform() * total_;
        size_t lo = 0, hi = cumulative_.size() - 1;
        while (lo < hi) {
            const size_t mid = (lo + hi) / 2;
            if (cumulative_[mid] < target) lo = mid + 1;
            else hi = mid;
        }
        const auto& tri = hull_.triangles[lo];
        return sample_tetrahedron(rng, hull_.centroid, hull_.vertices[size_t(tri[0])],
                                  hull_.vertices[size_t(tri[1])], hull_.vertices[size_t(tri[2])]);
    }

private:
    const ConvexHull& hull_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

// Monte-Carlo containment oracle for pair intersection. Samples points
// inside each hull and tests them against the other hull's face planes.
// A pair is only "certain" when the evidence clears the epsilon band with
// a 10x margin, so borderline geometry never produces a spurious mismatch.
struct McVerdict {
    bool certain_intersect = false;
    bool certain_disjoint = false;
    int hits = 0;
    double best_margin = 0.0; // deepest mutual containment found (m)
};

// ------------------------------------------------------- scene builders

inline SceneObject box_object(const std::string& id, double sx, double sy, double sz,
                              double mass = 1.0, bool movable = true) {
    SceneObject o;
    o.id = id;
    o.name = id;
    o.hulls.push_back(convex_hull(box_points(sx, sy, sz)));
    o.mass = mass;
    o.movable = movable;
    return o;
}

inline void add_object(Scene& scene, SceneObject obj, const SupportNode& node, const Pose& pose) {
    scene.tree.parent[obj.id] = node;
    scene.raw_layout.poses[obj.id] = pose;
    scene.objects.push_back(std::move(obj));
}

inline Scene& finalize(Scene& scene) {
    std::sort(scene.objects.begin(), scene.objects.end(),
              [](const SceneObject& a, const SceneObject& b) { return a.id < b.id; });
    validate_scene(scene);
    return scene;
}

inline SupportNode on_ground() { return {ParentKind::Ground, "", Relation::On}; }
inline SupportNode on_object(const std::string& parent) {
    return {ParentKind::Object, parent, Relation::On};
}

inline Pose at(double x, double y, double z) { return {UnitQuat::identity(), {x, y, z}}; }

inline McVerdict mc_pair_verdict(Rng& rng, const ConvexHull& a, const Pose& pa,
                                 const ConvexHull& b, const Pose& pb, int samples_per_side,
                                 double certify_margin = 1e-4) {
    McVerdict v;
    const Pose a_to_b = pb.inverse() * pa;
    const Pose b_to_a = pa.inverse() * pb;
    const HullSampler sa(a);
    const HullSampler sb(b);
    for (int side = 0; side < 2; ++side) {
        const HullSampler& sampler = side == 0 ? sa : sb;
        const ConvexHull& self = side == 0 ? a : b;
        const ConvexHull& other = side == 0 ? b : a;
        const Pose& into_other = side == 0 ? a_to_b : b_to_a;
        for (int i = 0; i < samples_per_side; ++i) {
            const Vec3 p = sampler.sample(rng);
            const Vec3 q = into_other.apply(p);
            const double margin_other = -other.max_plane_distance(q);
            if (margin_other <= 0.0) continue;
            const double margin_self = -self.max_plane_distance(p);
            const double margin = std::min(margin_self, margin_other);
            ++v.hits;
            v.best_margin = std::max(v.best_margin, margin);
        }
    }
    if (v.hits > 0 && v.best_margin > certify_margin) v.certain_intersect = true;
    if (v.hits == 0) v.certain_disjoint = true;
    return v;
}

} // namespace testutil
