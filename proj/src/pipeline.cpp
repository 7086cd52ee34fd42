#include "stablescene/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "stablescene/collision.hpp"
#include "stablescene/errors.hpp"
#include "stablescene/log.hpp"
#include "stablescene/rng.hpp"

namespace stablescene {

namespace {

uint64_t derive_seed(uint64_t base, uint64_t salt) {
    Rng r(base ^ (0xa0761d6478bd642fULL * (salt + 1)));
    return r.next_u64();
}

void record_run(PipelineReport* report, std::string label, std::vector<std::string> opt_ids,
                const CemResult& res) {
    if (!report) return;
    GroupRunRecord rec;
    rec.label = std::move(label);
    rec.opt_ids = std::move(opt_ids);
    rec.best_energy = res.best_energy.total;
    rec.history = res.history;
    rec.logs = res.logs;
    rec.evaluations = res.evaluations;
    report->runs.push_back(std::move(rec));
}

int tree_depth(const SceneTree& tree, const std::string& id) {
    int depth = 0;
    std::string cur = id;
    while (tree.at(cur).kind == ParentKind::Object) {
        cur = tree.at(cur).parent_id;
        ++depth;
    }
    return depth;
}

} // namespace

std::set<std::string> evaluation_fixed_ids(const Scene& scene) {
    std::set<std::string> fixed;
    for (const SceneObject& obj : scene.objects) {
        if (!obj.movable) fixed.insert(obj.id);
        if (scene.tree.wall_or_ceiling_rooted(obj.id)) fixed.insert(obj.id);
    }
    return fixed;
}

Layout optimize_local_groups(const Scene& scene, const SceneTree& tree, const Layout& cano,
                             const OptimizeConfig& config, PipelineReport* report) {
    Layout working = cano;
    const std::vector<LocalGroup> groups = local_groups(tree);
    size_t ordinal = 0;
    for (const LocalGroup& group : groups) {
        ++ordinal;
        std::vector<std::string> opt_ids;
        for (const std::string& c : group.child_ids)
            if (scene.object(c).movable) opt_ids.push_back(c);
        if (opt_ids.empty()) continue;

        // sub-scene: the anchored root plus the children's full subtrees
        std::vector<std::string> include{group.root_id};
        std::set<std::string> fixed{group.root_id};
        std::map<std::string, std::vector<std::string>> followers;
        for (const std::string& c : group.child_ids) {
            include.push_back(c);
            const auto desc = tree.descendants_of(c);
            include.insert(include.end(), desc.begin(), desc.end());
            std::vector<std::string> movable_desc;
            for (const std::string& d : desc)
                if (scene.object(d).movable) movable_desc.push_back(d);
            if (!movable_desc.empty()) followers[c] = std::move(movable_desc);
        }
        for (const std::string& id : include)
            if (!scene.object(id).movable) fixed.insert(id);

        CemConfig cem = config.cem;
        cem.rng_seed = derive_seed(config.cem.rng_seed, ordinal);
        try {
            const CemResult res =
                cem_optimize(scene, working, opt_ids, fixed, cem, config.weights, config.sim,
                             include, followers);
            for (const std::string& id : include)
                if (!fixed.count(id)) working.poses[id] = res.best.at(id);
            record_run(report, "local:" + group.root_id, opt_ids, res);
        } catch (const OptimizationFailed& e) {
            throw OptimizationFailed("local group '" + group.root_id + "': " + e.what());
        }
    }
    return working;
}

Layout optimize_global(const Scene& scene, const SceneTree& tree, const Layout& after_local,
                       const OptimizeConfig& config, PipelineReport* report) {
    std::vector<std::string> roots = global_roots(tree);
    std::vector<std::string> opt_ids;
    for (const std::string& r : roots)
        if (scene.object(r).movable) opt_ids.push_back(r);

    // everything except wall/ceiling-rooted subtrees participates
    std::vector<std::string> include;
    std::set<std::string> fixed;
    for (const SceneObject& obj : scene.objects) {
        if (scene.tree.wall_or_ceiling_rooted(obj.id)) continue;
        include.push_back(obj.id);
        if (!obj.movable) fixed.insert(obj.id);
    }
    if (opt_ids.empty()) return after_local;

    // nested roots: ancestors adjust first, descendants' own adjustments
    // compose on top
    std::stable_sort(opt_ids.begin(), opt_ids.end(), [&](const std::string& a,
                                                         const std::string& b) {
        const int da = tree_depth(tree, a), db = tree_depth(tree, b);
        if (da != db) return da < db;
        return a < b;
    });

    std::map<std::string, std::vector<std::string>> followers;
    for (const std::string& r : opt_ids) {
        std::vector<std::string> movable_desc;
        for (const std::string& d : tree.descendants_of(r))
            if (scene.object(d).movable) movable_desc.push_back(d);
        if (!movable_desc.empty()) followers[r] = std::move(movable_desc);
    }

    CemConfig cem = config.cem;
    cem.rng_seed = derive_seed(config.cem.rng_seed, 0);
    try {
        const CemResult res = cem_optimize(scene, after_local, opt_ids, fixed, cem,
                                           config.weights, config.sim, include, followers);
        Layout out = after_local;
        for (const std::string& id : include)
            if (!fixed.count(id)) out.poses[id] = res.best.at(id);
        record_run(report, "global", opt_ids, res);
        return out;
    } catch (const OptimizationFailed& e) {
        throw OptimizationFailed(std::string("global stage: ") + e.what());
    }
}

namespace {

struct RoomPlane {
    const char* name;
    Vec3 outward;
    double offset; // plane: dot(outward, p) == offset
};

bool members_intersect_settled(const Scene& scene, const Layout& layout,
                               const std::vector<std::string>& members,
                               const std::vector<std::string>& settled_ids) {
    for (const std::string& m : members)
        for (const std::string& s : settled_ids)
            if (objects_intersect(scene.object(m), layout.at(m), scene.object(s), layout.at(s)))
                return true;
    return false;
}

Vec3 volume_centroid(const SceneObject& obj, const Pose& pose) {
    Vec3 c{0, 0, 0};
    double vol = 0.0;
    for (const ConvexHull& h : obj.hulls) {
        c += h.volume * pose.apply(h.centroid);
        vol += h.volume;
    }
    return c / vol;
}

} // namespace

Layout place_wall_ceiling(const Scene& scene, const SceneTree& tree, const Layout& settled) {
    Layout out = settled;
    out.stage = LayoutStage::Optimized;

    std::vector<std::string> wall_objs;
    for (ParentKind k : {ParentKind::Wall, ParentKind::Ceiling})
        for (const std::string& id : tree.children_of_canonical(k)) wall_objs.push_back(id);
    std::sort(wall_objs.begin(), wall_objs.end());
    if (wall_objs.empty()) return out;

    std::vector<std::string> settled_ids;
    for (const SceneObject& obj : scene.objects)
        if (!tree.wall_or_ceiling_rooted(obj.id)) settled_ids.push_back(obj.id);
    if (settled_ids.empty())
        throw StageError("place_wall_ceiling: no settled objects to fit walls from");

    Aabb room;
    for (const std::string& id : settled_ids)
        for (const ConvexHull& h : scene.object(id).hulls) room.extend(aabb_of(h, out.at(id)));

    const RoomPlane back{"back", {0, 0, 1}, room.max.z};
    const RoomPlane left{"left", {-1, 0, 0}, -room.min.x};
    const RoomPlane right{"right", {1, 0, 0}, room.max.x};
    const RoomPlane ceiling{"ceiling", {0, 1, 0}, room.max.y};

    for (const std::string& id : wall_objs) {
        std::vector<std::string> members{id};
        const auto desc = tree.descendants_of(id);
        members.insert(members.end(), desc.begin(), desc.end());

        if (!members_intersect_settled(scene, out, members, settled_ids)) continue;

        // nearest fitted surface by centroid distance
        std::vector<const RoomPlane*> candidates;
        if (tree.at(id).kind == ParentKind::Ceiling) candidates = {&ceiling};
        else candidates = {&back, &left, &right};
        const Vec3 centroid = volume_centroid(scene.object(id), out.at(id));
        const RoomPlane* plane = candidates[0];
        double best = std::abs(dot(plane->outward, centroid) - plane->offset);
        for (const RoomPlane* cand : candidates) {
            const double d = std::abs(dot(cand->outward, centroid) - cand->offset);
            if (d < best) {
                best = d;
                plane = cand;
            }
        }

        // march outward in 1 mm steps until collision-free
        const Vec3 step = 0.001 * plane->outward;
        int guard = 0;
        while (members_intersect_settled(scene, out, members, settled_ids)) {
            if (++guard > 100000)
                throw StageError("place_wall_ceiling: object '" + id +
                                 "' cannot be freed along plane " + plane->name);
            for (const std::string& m : members) {
                Pose p = out.at(m);
                p.translation += step;
                out.poses[m] = p;
            }
        }
        logging::info("wall placement: moved '" + id + "' " + std::to_string(guard) +
                      " mm along " + plane->name);
    }
    return out;
}

PipelineReport run_pipeline(const Scene& scene, const OptimizeConfig& config) {
    PipelineReport report;
    report.raw = scene.raw_layout;

    report.up = estimate_up(scene, scene.raw_layout);
    const Layout reoriented = reorient_scene(scene.raw_layout, report.up);
    report.cano = snap_supports(scene, scene.tree, reoriented);

    const std::set<std::string> eval_fixed = evaluation_fixed_ids(scene);
    auto stage_energy = [&](const Layout& layout) {
        return evaluate_candidate(scene, layout, report.cano, eval_fixed, config.weights,
                                  config.sim);
    };

    report.energy_cano = stage_energy(report.cano);
    report.after_local = optimize_local_groups(scene, scene.tree, report.cano, config, &report);
    report.energy_after_local = stage_energy(report.after_local);
    report.after_global =
        optimize_global(scene, scene.tree, report.after_local, config, &report);
    report.energy_after_global = stage_energy(report.after_global);
    report.final_layout = place_wall_ceiling(scene, scene.tree, report.after_global);
    report.energy_final = stage_energy(report.final_layout);

    const SimTrace final_trace =
        settle(scene, report.final_layout, eval_fixed, config.sim);
    report.final_phys = phys_metrics(scene, report.final_layout, final_trace);
    report.final_intersecting_pairs =
        count_intersecting_pairs(scene, report.final_layout, scene.ids());
    return report;
}

} // namespace stablescene
