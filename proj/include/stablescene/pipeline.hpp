#pragma once

#include "stablescene/canon.hpp"
#include "stablescene/cem.hpp"
#include "stablescene/energy.hpp"
#include "stablescene/metrics.hpp"
#include "stablescene/scene.hpp"
#include "stablescene/sim.hpp"

namespace stablescene {

struct OptimizeConfig {
    CemConfig cem;
    EnergyWeights weights;
    SimConfig sim;
};

/// One CEM run inside the pipeline (a local group or the global pass).
struct GroupRunRecord {
    std::string label; // "local:<root-id>" or "global"
    std::vector<std::string> opt_ids;
    double best_energy = 0.0;
    std::vector<double> history; // best-so-far per iteration
    std::vector<CemIterationLog> logs;
    long long evaluations = 0;
};

struct PipelineReport {
    Layout raw;
    Layout cano;
    Layout after_local;
    Layout after_global;
    Layout final_layout;

    std::vector<GroupRunRecord> runs;

    // per-stage full-scene energies, measured against the canonical layout
    EnergyReport energy_cano;
    EnergyReport energy_after_local;
    EnergyReport energy_after_global;
    EnergyReport energy_final;

    PhysReport final_phys;
    int final_intersecting_pairs = 0;
    UpEstimate up;
};

/// Stage (a): post-order CEM over each local group's children (group root
/// anchored at its current pose); optimized poses are written back before
/// the parent group runs.
Layout optimize_local_groups(const Scene& scene, const SceneTree& tree, const Layout& cano,
                             const OptimizeConfig& config, PipelineReport* report = nullptr);

/// Stage (b): one CEM over the global roots, each root adjustment applied
/// rigidly to the root and all its descendants. Wall/ceiling-rooted objects
/// are excluded entirely.
Layout optimize_global(const Scene& scene, const SceneTree& tree, const Layout& after_local,
                       const OptimizeConfig& config, PipelineReport* report = nullptr);

/// Stage (c): wall/ceiling objects keep their canonical poses unless they
/// intersect the settled scene; offenders translate outward along their
/// assigned room plane's normal in 1 mm steps until collision-free.
Layout place_wall_ceiling(const Scene& scene, const SceneTree& tree, const Layout& settled);

/// canonicalize -> local groups -> global -> wall placement, with per-stage
/// energies and final physical metrics. Deterministic for a fixed seed.
PipelineReport run_pipeline(const Scene& scene, const OptimizeConfig& config);

/// Fixed set used for whole-scene evaluation: non-movable objects plus
/// every wall/ceiling-rooted object.
std::set<std::string> evaluation_fixed_ids(const Scene& scene);

} // namespace stablescene
