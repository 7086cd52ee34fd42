#include "stablescene/energy.hpp"

#include <cmath>
#include <limits>

#include "stablescene/collision.hpp"
#include "stablescene/errors.hpp"
#include "stablescene/log.hpp"

namespace stablescene {

void EnergyWeights::validate() const {
    if (lambda_stab < 0 || lambda_vel < 0 || lambda_pen < 0 || lambda_layout < 0 ||
        lambda_pos < 0)
        throw ValidationError(ValidationCode::BadField, "", "energy weights must be >= 0");
}

bool objects_intersect(const SceneObject& a, const Pose& pose_a, const SceneObject& b,
                       const Pose& pose_b) {
    for (const ConvexHull& ha : a.hulls)
        for (const ConvexHull& hb : b.hulls)
            if (hulls_intersect(ha, pose_a, hb, pose_b)) return true;
    return false;
}

int count_intersecting_pairs(const Scene& scene, const Layout& layout,
                             const std::vector<std::string>& ids) {
    int count = 0;
    for (size_t i = 0; i < ids.size(); ++i) {
        const SceneObject& a = scene.object(ids[i]);
        for (size_t j = i + 1; j < ids.size(); ++j) {
            const SceneObject& b = scene.object(ids[j]);
            if (objects_intersect(a, layout.at(ids[i]), b, layout.at(ids[j]))) ++count;
        }
    }
    return count;
}

double energy_stab(const SimTrace& trace, const Layout& candidate) {
    double e = 0.0;
    for (const auto& [id, fin] : trace.final_state) {
        if (!fin.dynamic) continue;
        const Pose& placed = candidate.at(id);
        e += norm(fin.pose.translation - placed.translation) +
             geodesic_distance(fin.pose.rotation, placed.rotation);
    }
    return e;
}

double energy_vel(const SimTrace& trace) {
    double e = 0.0;
    for (const auto& [id, st] : trace.probe) {
        if (!st.dynamic) continue;
        e += norm(st.lin_vel);
    }
    return e;
}

double energy_pen(const Scene& scene, const Layout& candidate, const SimTrace& trace,
                  const std::vector<std::string>& ids) {
    Layout settled;
    for (const std::string& id : ids) settled.poses[id] = trace.final_state.at(id).pose;
    return double(count_intersecting_pairs(scene, candidate, ids) +
                  count_intersecting_pairs(scene, settled, ids));
}

double energy_layout(const SimTrace& trace, const Layout& cano, const EnergyWeights& weights) {
    double e = 0.0;
    for (const auto& [id, fin] : trace.final_state) {
        if (!fin.dynamic) continue;
        const Pose& ref = cano.at(id);
        e += weights.lambda_pos * norm(fin.pose.translation - ref.translation) +
             geodesic_distance(fin.pose.rotation, ref.rotation);
    }
    return e;
}

EnergyReport evaluate_candidate(const Scene& scene, const Layout& candidate, const Layout& cano,
                                const std::set<std::string>& fixed_ids,
                                const EnergyWeights& weights, const SimConfig& sim_config,
                                const std::vector<std::string>& include_ids) {
    EnergyReport report;
    SimTrace trace;
    try {
        trace = settle(scene, candidate, fixed_ids, sim_config, include_ids);
    } catch (const SimulationDiverged& e) {
        logging::warn(std::string("candidate discarded: ") + e.what());
        report.total = std::numeric_limits<double>::infinity();
        return report;
    }
    std::vector<std::string> ids;
    ids.reserve(trace.final_state.size());
    for (const auto& [id, st] : trace.final_state) ids.push_back(id);

    report.e_stab = energy_stab(trace, candidate);
    report.e_vel = energy_vel(trace);
    report.e_pen = energy_pen(scene, candidate, trace, ids);
    report.e_layout = energy_layout(trace, cano, weights);
    report.total = weights.lambda_stab * report.e_stab + weights.lambda_vel * report.e_vel +
                   weights.lambda_pen * report.e_pen + weights.lambda_layout * report.e_layout;
    return report;
}

} // namespace stablescene
