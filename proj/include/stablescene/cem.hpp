#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stablescene/energy.hpp"
#include "stablescene/scene.hpp"
#include "stablescene/sim.hpp"

namespace stablescene {

/// CEM hyperparameters. Defaults are the reported settings: K = 2048,
/// T = 15, rho = 0.025, two episodes, sigma0 = (0.05, 0.005, 0.05) m and
/// (0.005, 0.05, 0.005) rad.
struct CemConfig {
    int samples = 2048;       // K
    int iterations = 15;      // T
    double elite_frac = 0.025; // rho
    int episodes = 2;
    Vec3 sigma0_trans{0.05, 0.005, 0.05};
    Vec3 sigma0_rot{0.005, 0.05, 0.005};
    uint64_t rng_seed = 0;
    int workers = 0; // 0 = hardware concurrency

    int elite_count() const;
    void validate() const;
};

/// Variance floor keeping the sampling distribution from collapsing.
inline constexpr double kSigmaFloor = 1e-4;

/// Per-iteration record; enough to recompute the moment-matching update
/// independently (elite samples in, mu/sigma out).
struct CemIterationLog {
    int episode = 0;
    int iteration = 0;
    double batch_best = 0.0;
    double best_so_far = 0.0;
    std::vector<int> elite_indices;
    std::vector<std::vector<double>> elite_samples; // elite x (6 * n_opt)
    std::vector<double> mu_after;                   // 6 * n_opt
    std::vector<double> var_after;                  // 6 * n_opt (diagonal)
};

struct CemResult {
    Layout best;
    EnergyReport best_energy;
    std::vector<double> best_adjustment;  // 6 * n_opt
    std::vector<double> history;          // best-so-far after each iteration
    std::vector<CemIterationLog> logs;
    long long evaluations = 0;
};

/// Test seam: maps (candidate layout, flat adjustment) to an energy report,
/// replacing the settle-based evaluation.
using CandidateEvaluator =
    std::function<EnergyReport(const Layout& candidate, const std::vector<double>& adjustment)>;

/// Cross-entropy search over per-object 6-DoF adjustments around
/// `base_layout`. Adjustments apply as pose' = (R * exp(dtheta), t + dt);
/// each opt id drags its `rigid_followers` along with the same world
/// transform (opt_ids must be ordered ancestors-first for nested roots).
/// Episode streams derive from (rng_seed, episode). Throws
/// OptimizationFailed when every candidate of an iteration diverges.
CemResult cem_optimize(const Scene& scene, const Layout& base_layout,
                       const std::vector<std::string>& opt_ids,
                       const std::set<std::string>& fixed_ids, const CemConfig& cem,
                       const EnergyWeights& weights, const SimConfig& sim_config,
                       const std::vector<std::string>& include_ids = {},
                       const std::map<std::string, std::vector<std::string>>& rigid_followers = {},
                       const CandidateEvaluator& evaluator = nullptr);

/// Candidate construction used by cem_optimize; exposed so tests can check
/// the rigid-follower property on sampled candidates.
Layout apply_adjustment(const Layout& base, const std::vector<std::string>& opt_ids,
                        const std::vector<double>& flat,
                        const std::map<std::string, std::vector<std::string>>& rigid_followers);

} // namespace stablescene
