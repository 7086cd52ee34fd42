#pragma once

#include <string>
#include <vector>

#include "stablescene/scene.hpp"
#include "stablescene/scene_io.hpp"
#include "stablescene/sim.hpp"

namespace stablescene {

/// Physical metric suite over a settling trace. Rates are percentages.
struct PhysReport {
    double collision_rate = 0.0; // % of objects in >= 1 intersecting pair (at layout poses)
    double stable_rate = 0.0;    // % of objects stable per is_stable
    double pos_drift = 0.0;      // mean final-vs-initial displacement, dynamic objects (m)
    double peak_lin_vel = 0.0;   // mean of per-object peaks (m/s)
    double peak_ang_vel = 0.0;   // mean of per-object peaks (rad/s)
};

struct GeoReport {
    double chamfer = 0.0; // squared-distance convention, mean aggregated
    double fscore = 0.0;  // @ 0.05 m
    double biou = 0.0;
    Pose icp_transform;   // applied to the prediction before chamfer/fscore
    double icp_rms = 0.0;
};

struct PointSet {
    std::vector<Vec3> points;
    std::string source; // "sampled" or the file it came from
};

PhysReport phys_metrics(const Scene& scene, const Layout& layout, const SimTrace& trace);

/// Area-weighted uniform surface samples over all posed hulls (seeded).
PointSet sample_scene_points(const Scene& scene, const Layout& layout, size_t count = 100000,
                             uint64_t seed = 0);

/// Area-weighted samples over a triangle mesh; falls back to the raw
/// vertices when the mesh has no faces.
PointSet sample_mesh_points(const ObjMesh& mesh, size_t count = 100000, uint64_t seed = 0);

/// GT loader: OBJ mesh (sampled) or whitespace-separated XYZ point list.
PointSet load_point_set(const std::string& path, size_t sample_count = 100000,
                        uint64_t seed = 0);

/// Point-to-point ICP (no scale). Returns the rigid transform taking src
/// onto dst; per-iteration RMS is non-increasing. Optionally records the
/// RMS sequence.
Pose icp_align(const PointSet& src, const PointSet& dst, int max_iters = 50, double tol = 1e-6,
               std::vector<double>* rms_history = nullptr);

/// Bidirectional mean squared nearest-neighbor distance.
double chamfer(const PointSet& src, const PointSet& dst);

/// F-score at `thresh`: harmonic mean of precision and recall.
double fscore(const PointSet& src, const PointSet& dst, double thresh = 0.05);

/// Mean per-object axis-aligned bounding-box IoU, matched by object id;
/// whole-scene AABBs when no ids match. Throws std::invalid_argument when
/// either scene is empty.
double biou(const Scene& scene_a, const Layout& layout_a, const Scene& scene_b,
            const Layout& layout_b);

PointSet apply_transform(const PointSet& ps, const Pose& transform);

} // namespace stablescene
