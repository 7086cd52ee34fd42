#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stablescene/scene.hpp"

namespace stablescene {

/// Settling-simulator knobs. Defaults follow the reported simulator setup:
/// gravity -9.8 along Y, 1/60 s steps with 2 substeps, L = 60 steps with the
/// velocity probe at step 15, damping 0.3, friction 1.0, zero restitution,
/// 0.01 m contact offset, 5 m/s depenetration cap, 6 solver iterations.
struct SimConfig {
    Vec3 gravity{0.0, -9.8, 0.0};
    double dt = 1.0 / 60.0;
    int substeps = 2;
    int steps = 60;       // L
    int vel_probe = 15;   // tau
    double lin_damping = 0.3;
    double ang_damping = 0.3;
    double friction = 1.0;
    double restitution = 0.0;
    double contact_offset = 0.01;
    double max_depenetration_vel = 5.0;
    int solver_iterations = 6;

    void validate() const; // throws ValidationError(BadField) on bad values
};

struct BodyState {
    Pose pose;
    Vec3 lin_vel;
    Vec3 ang_vel;
    bool dynamic = true;
};

struct SimTrace {
    std::map<std::string, BodyState> initial;     // step 0, as placed
    std::map<std::string, BodyState> probe;       // after step tau
    std::map<std::string, BodyState> final_state; // after step L
    std::map<std::string, double> peak_lin_vel;
    std::map<std::string, double> peak_ang_vel;
};

/// Per-step state callback, e.g. for NDJSON trace dumps.
using StepObserver = std::function<void(int step, const std::string& id, const BodyState&)>;

/// Deterministic rigid-body settling rollout. Bodies listed in `fixed_ids`
/// (plus objects with movable == false) never move; an implicit static
/// ground plane sits at Y = 0. When `include_ids` is non-empty only those
/// objects participate. Throws SimulationDiverged when a body state goes
/// non-finite.
SimTrace settle(const Scene& scene, const Layout& layout, const std::set<std::string>& fixed_ids,
                const SimConfig& config, const std::vector<std::string>& include_ids = {},
                const StepObserver& observer = nullptr);

/// Per-object stability per the drift thresholds (default 0.1 m / 0.1 rad);
/// fixed bodies are always stable.
std::map<std::string, bool> is_stable(const SimTrace& trace, double pos_thresh = 0.1,
                                      double rot_thresh = 0.1);

} // namespace stablescene
