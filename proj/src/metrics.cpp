#include "stablescene/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "stablescene/collision.hpp"
#include "stablescene/energy.hpp"
#include "stablescene/errors.hpp"
#include "stablescene/kdtree.hpp"
#include "stablescene/rng.hpp"

namespace stablescene {

PhysReport phys_metrics(const Scene& scene, const Layout& layout, const SimTrace& trace) {
    PhysReport rep;
    std::vector<std::string> ids;
    for (const auto& [id, st] : trace.initial) ids.push_back(id);
    if (ids.empty()) return rep;

    // collision rate over the evaluated layout's geometry
    std::set<std::string> colliding;
    for (size_t i = 0; i < ids.size(); ++i) {
        for (size_t j = i + 1; j < ids.size(); ++j) {
            if (objects_intersect(scene.object(ids[i]), layout.at(ids[i]), scene.object(ids[j]),
                                  layout.at(ids[j]))) {
                colliding.insert(ids[i]);
                colliding.insert(ids[j]);
            }
        }
    }
    rep.collision_rate = 100.0 * double(colliding.size()) / double(ids.size());

    const auto stable = is_stable(trace);
    int n_stable = 0;
    for (const auto& [id, ok] : stable) n_stable += ok ? 1 : 0;
    rep.stable_rate = 100.0 * double(n_stable) / double(ids.size());

    int n_dyn = 0;
    for (const std::string& id : ids) {
        if (!trace.initial.at(id).dynamic) continue;
        ++n_dyn;
        rep.pos_drift += norm(trace.final_state.at(id).pose.translation -
                              trace.initial.at(id).pose.translation);
        rep.peak_lin_vel += trace.peak_lin_vel.at(id);
        rep.peak_ang_vel += trace.peak_ang_vel.at(id);
    }
    if (n_dyn > 0) {
        rep.pos_drift /= n_dyn;
        rep.peak_lin_vel /= n_dyn;
        rep.peak_ang_vel /= n_dyn;
    }
    return rep;
}

namespace {

Vec3 sample_triangle(Rng& rng, const Vec3& a, const Vec3& b, const Vec3& c) {
    double r1 = rng.uniform(), r2 = rng.uniform();
    if (r1 + r2 > 1.0) {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
    }
    return a + r1 * (b - a) + r2 * (c - a);
}

PointSet sample_triangles(const std::vector<std::array<Vec3, 3>>& tris, size_t count,
                          uint64_t seed) {
    PointSet ps;
    ps.source = "sampled";
    if (tris.empty() || count == 0) return ps;
    std::vector<double> cumulative;
    cumulative.reserve(tris.size());
    double acc = 0.0;
    for (const auto& t : tris) {
        acc += 0.5 * norm(cross(t[1] - t[0], t[2] - t[0]));
        cumulative.push_back(acc);
    }
    Rng rng(seed);
    ps.points.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        const double target = rng.uniform() * acc;
        const size_t ti = size_t(std::lower_bound(cumulative.begin(), cumulative.end(), target) -
                                 cumulative.begin());
        const auto& t = tris[std::min(ti, tris.size() - 1)];
        ps.points.push_back(sample_triangle(rng, t[0], t[1], t[2]));
    }
    return ps;
}

} // namespace

PointSet sample_scene_points(const Scene& scene, const Layout& layout, size_t count,
                             uint64_t seed) {
    std::vector<std::array<Vec3, 3>> tris;
    for (const SceneObject& obj : scene.objects) {
        const Pose& pose = layout.at(obj.id);
        for (const ConvexHull& h : obj.hulls)
            for (const auto& t : h.triangles)
                tris.push_back({pose.apply(h.vertices[size_t(t[0])]),
                                pose.apply(h.vertices[size_t(t[1])]),
                                pose.apply(h.vertices[size_t(t[2])])});
    }
    return sample_triangles(tris, count, seed);
}

PointSet sample_mesh_points(const ObjMesh& mesh, size_t count, uint64_t seed) {
    if (mesh.triangles.empty()) {
        PointSet ps;
        ps.points = mesh.vertices;
        ps.source = "vertices";
        return ps;
    }
    std::vector<std::array<Vec3, 3>> tris;
    tris.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles)
        tris.push_back({mesh.vertices[size_t(t[0])], mesh.vertices[size_t(t[1])],
                        mesh.vertices[size_t(t[2])]});
    return sample_triangles(tris, count, seed);
}

PointSet load_point_set(const std::string& path, size_t sample_count, uint64_t seed) {
    const std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".obj") {
        PointSet ps = sample_mesh_points(load_obj(path), sample_count, seed);
        ps.source = path;
        return ps;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open point set: " + path);
    PointSet ps;
    ps.source = path;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        Vec3 p;
        if (ls >> p.x >> p.y >> p.z) ps.points.push_back(p);
    }
    if (ps.points.empty()) throw std::runtime_error("empty point set: " + path);
    return ps;
}

PointSet apply_transform(const PointSet& ps, const Pose& transform) {
    PointSet out;
    out.source = ps.source;
    out.points.reserve(ps.points.size());
    for (const Vec3& p : ps.points) out.points.push_back(transform.apply(p));
    return out;
}

namespace {

// Closed-form best rigid fit src -> dst over paired points (Kabsch/SVD).
Pose best_fit_rigid(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
    const size_t n = src.size();
    Vec3 cs{0, 0, 0}, cd{0, 0, 0};
    for (size_t i = 0; i < n; ++i) {
        cs += src[i];
        cd += dst[i];
    }
    cs = cs / double(n);
    cd = cd / double(n);

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (size_t i = 0; i < n; ++i) {
        const Vec3 p = src[i] - cs;
        const Vec3 q = dst[i] - cd;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) h(r, c) += p[r] * q[c];
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixV() * svd.matrixU().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d v = svd.matrixV();
        v.col(2) *= -1.0;
        r = v * svd.matrixU().transpose();
    }

    // rotation matrix -> quaternion
    const Eigen::Quaterniond q(r);
    const UnitQuat rot = UnitQuat{q.w(), q.x(), q.y(), q.z()}.normalize();
    const Vec3 t = cd - rot.rotate(cs);
    return Pose{rot, t};
}

} // namespace

Pose icp_align(const PointSet& src, const PointSet& dst, int max_iters, double tol,
               std::vector<double>* rms_history) {
    if (src.points.empty() || dst.points.empty())
        throw std::invalid_argument("icp_align: empty point set");

    const KdTree3 tree(dst.points);
    std::vector<Vec3> current = src.points;
    Pose total = Pose::identity();
    double prev_rms = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iters; ++iter) {
        std::vector<Vec3> targets(current.size());
        double sq_sum = 0.0;
        for (size_t i = 0; i < current.size(); ++i) {
            const KdTree3::Hit hit = tree.nearest(current[i]);
            targets[i] = dst.points[hit.index];
            sq_sum += hit.dist2;
        }
        const Pose step = best_fit_rigid(current, targets);
        for (Vec3& p : current) p = step.apply(p);
        total = step * total;

        double post = 0.0;
        for (size_t i = 0; i < current.size(); ++i) post += norm2(current[i] - targets[i]);
        const double rms = std::sqrt(post / double(current.size()));
        if (rms_history) rms_history->push_back(rms);
        if (std::abs(prev_rms - rms) < tol) break;
        prev_rms = rms;
        (void)sq_sum;
    }
    return total;
}

double chamfer(const PointSet& src, const PointSet& dst) {
    if (src.points.empty() || dst.points.empty())
        throw std::invalid_argument("chamfer: empty point set");
    const KdTree3 ta(src.points);
    const KdTree3 tb(dst.points);
    double a_to_b = 0.0;
    for (const Vec3& p : src.points) a_to_b += tb.nearest(p).dist2;
    double b_to_a = 0.0;
    for (const Vec3& p : dst.points) b_to_a += ta.nearest(p).dist2;
    return a_to_b / double(src.points.size()) + b_to_a / double(dst.points.size());
}

double fscore(const PointSet& src, const PointSet& dst, double thresh) {
    if (src.points.empty() || dst.points.empty())
        throw std::invalid_argument("fscore: empty point set");
    const double t2 = thresh * thresh;
    const KdTree3 ta(src.points);
    const KdTree3 tb(dst.points);
    size_t hit_src = 0;
    for (const Vec3& p : src.points)
        if (tb.nearest(p).dist2 <= t2) ++hit_src;
    size_t hit_dst = 0;
    for (const Vec3& p : dst.points)
        if (ta.nearest(p).dist2 <= t2) ++hit_dst;
    const double precision = double(hit_src) / double(src.points.size());
    const double recall = double(hit_dst) / double(dst.points.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

Aabb object_aabb(const SceneObject& obj, const Pose& pose) {
    Aabb box;
    for (const ConvexHull& h : obj.hulls) box.extend(aabb_of(h, pose));
    return box;
}

} // namespace

double biou(const Scene& scene_a, const Layout& layout_a, const Scene& scene_b,
            const Layout& layout_b) {
    if (scene_a.objects.empty() || scene_b.objects.empty())
        throw std::invalid_argument("biou: empty scene");

    std::vector<std::string> matched;
    for (const SceneObject& obj : scene_a.objects)
        if (scene_b.find(obj.id)) matched.push_back(obj.id);

    if (matched.empty()) {
        Aabb a, b;
        for (const SceneObject& o : scene_a.objects) a.extend(object_aabb(o, layout_a.at(o.id)));
        for (const SceneObject& o : scene_b.objects) b.extend(object_aabb(o, layout_b.at(o.id)));
        return aabb_iou(a, b);
    }
    double sum = 0.0;
    for (const std::string& id : matched) {
        sum += aabb_iou(object_aabb(scene_a.object(id), layout_a.at(id)),
                        object_aabb(scene_b.object(id), layout_b.at(id)));
    }
    return sum / double(matched.size());
}

} // namespace stablescene
