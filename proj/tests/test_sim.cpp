#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablescene/collision.hpp"
#include "stablescene/errors.hpp"
#include "stablescene/sim.hpp"
#include "test_util.hpp"

using namespace stablescene;
using namespace testutil;

namespace {

double lowest_point(const SceneObject& obj, const Pose& pose) {
    double y = std::numeric_limits<double>::infinity();
    for (const ConvexHull& h : obj.hulls)
        for (const Vec3& v : h.vertices) y = std::min(y, pose.apply(v).y);
    return y;
}

bool objects_overlap(const SceneObject& a, const Pose& pa, const SceneObject& b, const Pose& pb) {
    for (const ConvexHull& ha : a.hulls)
        for (const ConvexHull& hb : b.hulls)
            if (hulls_intersect(ha, pa, hb, pb)) return true;
    return false;
}

double kinetic_energy(const Scene& scene, const std::map<std::string, BodyState>& states) {
    double e = 0.0;
    for (const auto& [id, st] : states) {
        if (!st.dynamic) continue;
        e += 0.5 * scene.object(id).mass * norm2(st.lin_vel);
    }
    return e;
}

} // namespace

TEST_CASE("resting box is in static equilibrium") {
    Scene s;
    add_object(s, box_object("box", 0.4, 0.4, 0.4, 2.0), on_ground(), at(0, 0.2, 0));
    finalize(s);
    const SimTrace tr = settle(s, s.raw_layout, {}, SimConfig{});
    const BodyState& fin = tr.final_state.at("box");
    CHECK(norm(fin.pose.translation - Vec3{0, 0.2, 0}) < 1e-4);
    CHECK(geodesic_distance(fin.pose.rotation, UnitQuat::identity()) < 1e-4);
    CHECK(is_stable(tr).at("box"));
}

TEST_CASE("aligned three-box stack stays put") {
    Scene s;
    add_object(s, box_object("a_base", 0.5, 0.5, 0.5, 4.0), on_ground(), at(0, 0.25, 0));
    add_object(s, box_object("b_mid", 0.4, 0.4, 0.4, 2.0), on_object("a_base"), at(0, 0.7, 0));
    add_object(s, box_object("c_top", 0.3, 0.3, 0.3, 1.0), on_object("b_mid"), at(0, 1.05, 0));
    finalize(s);
    const SimTrace tr = settle(s, s.raw_layout, {}, SimConfig{});
    for (const auto& [id, fin] : tr.final_state) {
        const BodyState& init = tr.initial.at(id);
        CHECK(norm(fin.pose.translation - init.pose.translation) < 1e-4);
        CHECK(geodesic_distance(fin.pose.rotation, init.pose.rotation) < 1e-4);
    }
    const auto stable = is_stable(tr);
    for (const auto& [id, ok] : stable) CHECK(ok);
}

TEST_CASE("dropped box: free-fall peak speed and resting height") {
    Scene s;
    add_object(s, box_object("box", 0.2, 0.2, 0.2, 1.0), on_ground(), at(0, 0.4, 0));
    finalize(s); // bottom at 0.3 m
    const SimConfig cfg;
    const SimTrace tr = settle(s, s.raw_layout, {}, cfg);

    const double expected_peak = std::sqrt(2.0 * 9.8 * 0.3); // 2.42 m/s
    const double peak = tr.peak_lin_vel.at("box");
    CHECK(std::abs(peak - expected_peak) / expected_peak < 0.15);

    const double rest_center = tr.final_state.at("box").pose.translation.y;
    CHECK(std::abs(rest_center - 0.1) <= 2.0 * cfg.contact_offset);
}

TEST_CASE("interpenetrating cubes separate and settle on ground") {
    Scene s;
    add_object(s, box_object("a", 1.0, 1.0, 1.0, 2.0), on_ground(), at(0, 0.5, 0));
    add_object(s, box_object("b", 1.0, 1.0, 1.0, 2.0), on_ground(), at(0.3, 0.5, 0));
    finalize(s);
    SimConfig cfg;
    cfg.steps = 120; // give the ejected cubes time to come to rest
    const SimTrace tr = settle(s, s.raw_layout, {}, cfg);
    const Pose pa = tr.final_state.at("a").pose;
    const Pose pb = tr.final_state.at("b").pose;
    CHECK_FALSE(objects_overlap(s.object("a"), pa, s.object("b"), pb));
    CHECK(lowest_point(s.object("a"), pa) > -(cfg.contact_offset + 1e-3));
    CHECK(lowest_point(s.object("b"), pb) > -(cfg.contact_offset + 1e-3));
    CHECK(lowest_point(s.object("a"), pa) < 0.05);
    CHECK(lowest_point(s.object("b"), pb) < 0.05);
}

TEST_CASE("determinism: identical inputs give identical traces") {
    Scene s;
    add_object(s, box_object("a", 0.4, 0.4, 0.4, 1.0), on_ground(), at(0, 0.5, 0));
    add_object(s, box_object("b", 0.3, 0.3, 0.3, 0.5), on_object("a"), at(0.05, 0.9, 0.02));
    finalize(s);
    const SimTrace t1 = settle(s, s.raw_layout, {}, SimConfig{});
    const SimTrace t2 = settle(s, s.raw_layout, {}, SimConfig{});
    for (const auto& [id, f1] : t1.final_state) {
        const BodyState& f2 = t2.final_state.at(id);
        CHECK(f1.pose.translation.x == f2.pose.translation.x);
        CHECK(f1.pose.translation.y == f2.pose.translation.y);
        CHECK(f1.pose.translation.z == f2.pose.translation.z);
        CHECK(f1.pose.rotation.w == f2.pose.rotation.w);
        CHECK(f1.lin_vel.x == f2.lin_vel.x);
        CHECK(t1.peak_lin_vel.at(id) == t2.peak_lin_vel.at(id));
    }
}

TEST_CASE("fixed bodies never move") {
    Scene s;
    add_object(s, box_object("anvil", 0.5, 0.5, 0.5, 10.0), on_ground(), at(0, 1.0, 0));
    add_object(s, box_object("pebble", 0.1, 0.1, 0.1, 0.1), on_ground(), at(0, 1.35, 0));
    finalize(s);
    const SimTrace tr = settle(s, s.raw_layout, {"anvil"}, SimConfig{});
    const BodyState& init = tr.initial.at("anvil");
    const BodyState& probe = tr.probe.at("anvil");
    const BodyState& fin = tr.final_state.at("anvil");
    CHECK_FALSE(init.dynamic);
    CHECK(norm(fin.pose.translation - init.pose.translation) == 0.0);
    CHECK(norm(probe.pose.translation - init.pose.translation) == 0.0);
    CHECK(tr.peak_lin_vel.at("anvil") == 0.0);
    // pebble rests on the floating fixed anvil
    CHECK(tr.final_state.at("pebble").pose.translation.y ==
          doctest::Approx(1.3).epsilon(0.02));
}

TEST_CASE("movable=false objects are implicitly fixed") {
    Scene s;
    add_object(s, box_object("wardrobe", 0.5, 1.0, 0.5, 50.0, false), on_ground(),
               at(0, 0.8, 0)); // floating, but fixed: must not fall
    finalize(s);
    const SimTrace tr = settle(s, s.raw_layout, {}, SimConfig{});
    CHECK(tr.final_state.at("wardrobe").pose.translation.y == 0.8);
}

TEST_CASE("probe snapshot is taken at the velocity-probe step") {
    Scene s;
    add_object(s, box_object("box", 0.2, 0.2, 0.2, 1.0), on_ground(), at(0, 2.0, 0));
    finalize(s);
    SimConfig cfg;
    const SimTrace tr = settle(s, s.raw_layout, {}, cfg);
    // still falling at tau = 15 (0.25 s): v ~ g t with damping, well below zero
    const double v_probe = tr.probe.at("box").lin_vel.y;
    const double t = cfg.vel_probe * cfg.dt;
    const double expect = -(9.8 / 0.3) * (1.0 - std::exp(-0.3 * t)); // damped free fall
    CHECK(std::abs(v_probe - expect) / std::abs(expect) < 0.05);
}

TEST_CASE("ground non-penetration invariant") {
    Rng rng(211);
    for (int trial = 0; trial < 5; ++trial) {
        Scene s;
        for (int i = 0; i < 5; ++i) {
            const std::string id = "obj" + std::to_string(i);
            add_object(s,
                       box_object(id, rng.uniform(0.15, 0.5), rng.uniform(0.15, 0.5),
                                  rng.uniform(0.15, 0.5), rng.uniform(0.5, 5.0)),
                       on_ground(),
                       Pose{random_quat(rng),
                            {rng.uniform(-1, 1), rng.uniform(0.1, 0.8), rng.uniform(-1, 1)}});
        }
        finalize(s);
        SimConfig cfg;
        const SimTrace tr = settle(s, s.raw_layout, {}, cfg);
        for (const auto& [id, fin] : tr.final_state)
            CHECK(lowest_point(s.object(id), fin.pose) >= -(cfg.contact_offset + 1e-3));
    }
}

TEST_CASE("no kinetic energy injection at settle") {
    Scene s;
    add_object(s, box_object("a", 0.4, 0.4, 0.4, 1.0), on_ground(), at(0, 0.6, 0));
    add_object(s, box_object("b", 0.3, 0.3, 0.3, 1.0), on_ground(), at(0.1, 1.2, 0.05));
    finalize(s);
    const SimTrace tr = settle(s, s.raw_layout, {}, SimConfig{});
    const double peak_possible =
        kinetic_energy(s, tr.probe) + 0.5 * 2.0 * (tr.peak_lin_vel.at("a") * tr.peak_lin_vel.at("a") +
                                                   tr.peak_lin_vel.at("b") * tr.peak_lin_vel.at("b"));
    CHECK(kinetic_energy(s, tr.final_state) <= peak_possible + 1e-9);
    // settled scene is essentially at rest
    CHECK(kinetic_energy(s, tr.final_state) < 1e-4);
}

TEST_CASE("divergence raises a structured error") {
    Scene s;
    add_object(s, box_object("box", 0.2, 0.2, 0.2, 1.0), on_ground(), at(0, 10.0, 0));
    finalize(s);
    SimConfig cfg;
    cfg.dt = 1e160; // overflow in the first position update
    cfg.substeps = 1;
    cfg.steps = 2;
    cfg.vel_probe = 1;
    cfg.lin_damping = 0.0;
    cfg.ang_damping = 0.0;
    try {
        settle(s, s.raw_layout, {}, cfg);
        FAIL("expected SimulationDiverged");
    } catch (const SimulationDiverged& e) {
        CHECK(e.id() == "box");
        CHECK(e.step() >= 1);
    }
}

TEST_CASE("sim config validation") {
    SimConfig cfg;
    cfg.dt = -1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SimConfig{};
    cfg.vel_probe = 100; // > steps
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SimConfig{};
    cfg.lin_damping = 2.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("is_stable thresholds") {
    SimTrace tr;
    auto mk = [](Vec3 t, UnitQuat q, bool dyn) {
        BodyState st;
        st.pose = {q, t};
        st.dynamic = dyn;
        return st;
    };
    tr.initial["still"] = mk({0, 0, 0}, UnitQuat::identity(), true);
    tr.final_state["still"] = mk({0, 0, 0}, UnitQuat::identity(), true);
    tr.initial["drifter"] = mk({0, 0, 0}, UnitQuat::identity(), true);
    tr.final_state["drifter"] = mk({0.11, 0, 0}, UnitQuat::identity(), true);
    tr.initial["wobbler"] = mk({0, 0, 0}, UnitQuat::identity(), true);
    tr.final_state["wobbler"] =
        mk({0.05, 0, 0}, UnitQuat::from_axis_angle({0, 1, 0}, 0.09), true);
    tr.initial["pinned"] = mk({0, 0, 0}, UnitQuat::identity(), false);
    tr.final_state["pinned"] = mk({0, 0, 0}, UnitQuat::identity(), false);

    const auto stable = is_stable(tr);
    CHECK(stable.at("still"));
    CHECK_FALSE(stable.at("drifter")); // 0.11 m > 0.1 m
    CHECK(stable.at("wobbler"));       // both under threshold
    CHECK(stable.at("pinned"));
}
