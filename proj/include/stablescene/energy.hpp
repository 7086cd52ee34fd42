#pragma once

#include <set>
#include <vector>

#include "stablescene/scene.hpp"
#include "stablescene/sim.hpp"

namespace stablescene {

/// Energy weights; defaults are the reported settings
/// (stab = vel = layout = 1, pen = 0.5, pos = 6).
struct EnergyWeights {
    double lambda_stab = 1.0;
    double lambda_vel = 1.0;
    double lambda_pen = 0.5;
    double lambda_layout = 1.0;
    double lambda_pos = 6.0;

    void validate() const;
};

struct EnergyReport {
    double e_stab = 0.0;
    double e_vel = 0.0;
    double e_pen = 0.0; // non-negative pair count (two snapshots summed)
    double e_layout = 0.0;
    double total = 0.0;

    bool diverged() const { return !std::isfinite(total); }
};

/// Any hull of a intersects any hull of b (beyond the contact epsilon).
bool objects_intersect(const SceneObject& a, const Pose& pose_a, const SceneObject& b,
                       const Pose& pose_b);

/// Unordered intersecting object pairs among `ids` at the given poses.
int count_intersecting_pairs(const Scene& scene, const Layout& layout,
                             const std::vector<std::string>& ids);

/// Deviation of settled poses from the placed candidate poses, summed over
/// dynamic bodies: ||t_L - t|| + d(R_L, R).
double energy_stab(const SimTrace& trace, const Layout& candidate);

/// Sum of linear speeds at the probe step over dynamic bodies.
double energy_vel(const SimTrace& trace);

/// Intersecting pair count at placement plus at settlement.
double energy_pen(const Scene& scene, const Layout& candidate, const SimTrace& trace,
                  const std::vector<std::string>& ids);

/// Deviation of settled poses from the canonical layout, summed over dynamic
/// bodies: lambda_pos * ||t_L - t_cano|| + d(R_L, R_cano).
double energy_layout(const SimTrace& trace, const Layout& cano, const EnergyWeights& weights);

/// One settle, all four terms from the single trace. A diverged simulation
/// yields total = +inf (the candidate is excluded from elites).
EnergyReport evaluate_candidate(const Scene& scene, const Layout& candidate, const Layout& cano,
                                const std::set<std::string>& fixed_ids,
                                const EnergyWeights& weights, const SimConfig& sim_config,
                                const std::vector<std::string>& include_ids = {});

} // namespace stablescene
