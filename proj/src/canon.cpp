#include "stablescene/canon.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "stablescene/errors.hpp"

namespace stablescene {

namespace {

constexpr double kDeg15 = 15.0 * 3.14159265358979323846 / 180.0;

double min_y_of(const SceneObject& obj, const Pose& pose) {
    double y = std::numeric_limits<double>::infinity();
    for (const ConvexHull& h : obj.hulls)
        for (const Vec3& v : h.vertices) y = std::min(y, pose.apply(v).y);
    return y;
}

// Sutherland-Hodgman against one axis-aligned half-plane in XZ, Y carried.
std::vector<Vec3> clip_half_plane(const std::vector<Vec3>& poly, int axis, double bound,
                                  bool keep_greater) {
    std::vector<Vec3> out;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec3& cur = poly[i];
        const Vec3& nxt = poly[(i + 1) % n];
        const double cv = cur[axis], nv = nxt[axis];
        const bool cin = keep_greater ? cv >= bound : cv <= bound;
        const bool nin = keep_greater ? nv >= bound : nv <= bound;
        if (cin) out.push_back(cur);
        if (cin != nin) {
            const double t = (bound - cv) / (nv - cv);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

} // namespace

double support_height_in_footprint(const std::vector<ConvexHull>& hulls, const Pose& pose,
                                   double x0, double x1, double z0, double z1) {
    double best = -std::numeric_limits<double>::infinity();
    for (const ConvexHull& h : hulls) {
        for (const auto& tri : h.triangles) {
            std::vector<Vec3> poly{pose.apply(h.vertices[size_t(tri[0])]),
                                   pose.apply(h.vertices[size_t(tri[1])]),
                                   pose.apply(h.vertices[size_t(tri[2])])};
            poly = clip_half_plane(poly, 0, x0, true);
            if (poly.empty()) continue;
            poly = clip_half_plane(poly, 0, x1, false);
            if (poly.empty()) continue;
            poly = clip_half_plane(poly, 2, z0, true);
            if (poly.empty()) continue;
            poly = clip_half_plane(poly, 2, z1, false);
            for (const Vec3& p : poly) best = std::max(best, p.y);
        }
    }
    return best;
}

UpEstimate estimate_up(const Scene& scene, const Layout& raw_layout) {
    Vec3 weighted{0, 0, 0};
    std::vector<Vec3> anchor_axes;
    for (const SceneObject& obj : scene.objects) {
        const SupportNode& node = scene.tree.at(obj.id);
        if (node.kind != ParentKind::Ground && node.kind != ParentKind::GroundWall) continue;
        const Vec3 axis = raw_layout.at(obj.id).rotation.rotate(Vec3{0, 1, 0});
        weighted += obj.hull_volume() * axis;
        anchor_axes.push_back(axis);
    }
    if (anchor_axes.empty())
        throw StageError("estimate_up: no ground-supported anchor objects in scene");

    UpEstimate est;
    est.direction = normalized(weighted);
    int within = 0;
    for (const Vec3& a : anchor_axes) {
        const double c = std::clamp(dot(a, est.direction), -1.0, 1.0);
        if (std::acos(c) <= kDeg15) ++within;
    }
    est.confidence = double(within) / double(anchor_axes.size());
    return est;
}

Layout reorient_scene(const Layout& raw_layout, const UpEstimate& up) {
    const Vec3 y{0, 1, 0};
    const Vec3 from = up.direction;
    UnitQuat q = UnitQuat::identity();
    const double c = dot(from, y);
    if (c < -1.0 + 1e-6) {
        q = UnitQuat::from_axis_angle({1, 0, 0}, 3.14159265358979323846);
    } else if (c < 1.0 - 1e-15) {
        const Vec3 axis = cross(from, y);
        const double angle = std::atan2(norm(axis), c);
        q = UnitQuat::from_axis_angle(axis, angle);
    }

    Layout out;
    out.stage = LayoutStage::Canonical;
    for (const auto& [id, pose] : raw_layout.poses)
        out.poses[id] = Pose{(q * pose.rotation).normalize(), q.rotate(pose.translation)};
    return out;
}

Layout snap_supports(const Scene& scene, const SceneTree& tree, const Layout& layout) {
    Layout out = layout;
    out.stage = LayoutStage::Canonical;

    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        const SceneObject* obj = scene.find(id);
        if (obj) {
            const SupportNode& node = tree.at(id);
            Pose pose = out.at(id);
            if (node.kind == ParentKind::Ground || node.kind == ParentKind::GroundWall) {
                pose.translation.y -= min_y_of(*obj, pose);
                out.poses[id] = pose;
            } else if (node.kind == ParentKind::Object &&
                       (node.relation == Relation::On || node.relation == Relation::Inside)) {
                const SceneObject& parent = scene.object(node.parent_id);
                const Pose& parent_pose = out.at(node.parent_id); // parent already snapped
                Aabb child_box;
                for (const ConvexHull& h : obj->hulls) child_box.extend(aabb_of(h, pose));
                Aabb parent_box;
                for (const ConvexHull& h : parent.hulls)
                    parent_box.extend(aabb_of(h, parent_pose));

                const double x0 = std::max(child_box.min.x, parent_box.min.x);
                const double x1 = std::min(child_box.max.x, parent_box.max.x);
                const double z0 = std::max(child_box.min.z, parent_box.min.z);
                const double z1 = std::min(child_box.max.z, parent_box.max.z);

                double support = -std::numeric_limits<double>::infinity();
                if (x0 <= x1 && z0 <= z1)
                    support =
                        support_height_in_footprint(parent.hulls, parent_pose, x0, x1, z0, z1);
                // horizontally disjoint footprints: rest the child at the
                // parent's overall top rather than teleporting it downward
                if (!std::isfinite(support)) support = parent_box.max.y;

                pose.translation.y += support - min_y_of(*obj, pose);
                out.poses[id] = pose;
            }
            // Hanging/Attached and wall/ceiling children stay untouched
        }
        for (const std::string& c : tree.children_of(id)) visit(c);
    };

    for (ParentKind k :
         {ParentKind::Ground, ParentKind::GroundWall, ParentKind::Wall, ParentKind::Ceiling}) {
        for (const std::string& root : tree.children_of_canonical(k)) visit(root);
    }
    return out;
}

Layout canonicalize(const Scene& scene, const Layout& raw_layout) {
    const UpEstimate up = estimate_up(scene, raw_layout);
    const Layout reoriented = reorient_scene(raw_layout, up);
    return snap_supports(scene, scene.tree, reoriented);
}

} // namespace stablescene
