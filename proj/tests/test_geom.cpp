#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablescene/collision.hpp"
#include "stablescene/hull.hpp"
#include "stablescene/errors.hpp"
#include "stablescene/quat.hpp"
#include "test_util.hpp"

using namespace stablescene;
using namespace testutil;

constexpr double kPi = 3.14159265358979323846;

TEST_CASE("geodesic distance basics") {
    Rng rng(11);
    const UnitQuat q = random_quat(rng);
    CHECK(geodesic_distance(q, q) == doctest::Approx(0.0).epsilon(1e-12));

    const UnitQuat id = UnitQuat::identity();
    const UnitQuat y90 = UnitQuat::from_axis_angle({0, 1, 0}, kPi / 2);
    CHECK(geodesic_distance(id, y90) == doctest::Approx(kPi / 2).epsilon(1e-12));

    // sign-flip invariance
    const UnitQuat nq{-q.w, -q.x, -q.y, -q.z};
    CHECK(geodesic_distance(id, q) == doctest::Approx(geodesic_distance(id, nq)).epsilon(1e-12));

    CHECK_THROWS_AS(geodesic_distance(UnitQuat{1.0, 0.5, 0, 0}, id), std::invalid_argument);
}

TEST_CASE("geodesic distance matches rotation-matrix trace formula") {
    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const UnitQuat a = random_quat(rng);
        const UnitQuat b = random_quat(rng);
        const double got = geodesic_distance(a, b);
        const double want = trace_formula_distance(a, b);
        CHECK(std::abs(got - want) < 1e-9);
        CHECK(got >= 0.0);
        CHECK(got <= kPi + 1e-12);
    }
}

TEST_CASE("geodesic distance metric axioms") {
    Rng rng(23);
    for (int i = 0; i < 1000; ++i) {
        const UnitQuat a = random_quat(rng);
        const UnitQuat b = random_quat(rng);
        const UnitQuat c = random_quat(rng);
        const double dab = geodesic_distance(a, b);
        const double dba = geodesic_distance(b, a);
        const double dac = geodesic_distance(a, c);
        const double dcb = geodesic_distance(c, b);
        CHECK(std::abs(dab - dba) < 1e-9);
        CHECK(dab <= dac + dcb + 1e-9);
        CHECK(geodesic_distance(a, a) < 1e-9);
    }
}

TEST_CASE("convex hull of a cube") {
    auto hull = convex_hull(box_points(1, 1, 1));
    CHECK(hull.vertices.size() == 8);
    CHECK(hull.volume == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(hull.centroid) < 1e-12);
    CHECK(hull.faces.size() == 6); // coplanar triangles merged

    // interior point discarded
    auto pts = box_points(1, 1, 1);
    pts.push_back({0.2, 0.1, -0.3});
    auto hull2 = convex_hull(pts);
    CHECK(hull2.vertices.size() == 8);
    CHECK(hull2.volume == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convex hull degenerate input") {
    CHECK_THROWS_AS(convex_hull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), DegenerateGeometry);
    // coplanar
    CHECK_THROWS_AS(convex_hull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}}),
                    DegenerateGeometry);
    // collinear
    CHECK_THROWS_AS(convex_hull({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}}),
                    DegenerateGeometry);
}

TEST_CASE("convex hull contains every input point") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec3> pts;
        for (int i = 0; i < 100; ++i) {
            Vec3 p;
            do {
                p = random_vec(rng, -1, 1);
            } while (norm(p) > 1.0);
            pts.push_back(p);
        }
        const ConvexHull hull = convex_hull(pts);
        for (const Vec3& p : pts) CHECK(hull.max_plane_distance(p) <= 1e-9);
        CHECK(hull.volume <= 4.0 / 3.0 * kPi + 1e-9);
        CHECK(hull.volume > 0.0);

        // idempotence on the hull's own vertices
        const ConvexHull again = convex_hull(hull.vertices);
        CHECK(again.volume == doctest::Approx(hull.volume).epsilon(1e-12));
    }
}

TEST_CASE("gjk distance on cubes") {
    const ConvexHull cube = unit_cube();
    Pose a;
    Pose b;
    b.translation = {3, 0, 0};
    CHECK(gjk_distance(cube, a, cube, b) == doctest::Approx(2.0).epsilon(1e-9));
    b.translation = {0.5, 0, 0};
    CHECK(gjk_distance(cube, a, cube, b) == 0.0);
    // symmetry
    b.translation = {1.75, 0.3, -0.2};
    CHECK(gjk_distance(cube, a, cube, b) ==
          doctest::Approx(gjk_distance(cube, b, cube, a)).epsilon(1e-12));
}

TEST_CASE("gjk random box pairs vs sampling oracle") {
    Rng rng(41);
    int tested = 0;
    while (tested < 50) {
        const ConvexHull ha = convex_hull(
            box_points(rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)));
        const ConvexHull hb = convex_hull(
            box_points(rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)));
        const Pose pa{random_quat(rng), random_vec(rng, -0.5, 0.5)};
        const Pose pb{random_quat(rng), random_vec(rng, -0.5, 0.5)};
        const McVerdict v = mc_pair_verdict(rng, ha, pa, hb, pb, 50000);
        if (!v.certain_intersect && !v.certain_disjoint) continue;
        ++tested;
        const double d = gjk_distance(ha, pa, hb, pb);
        if (v.certain_intersect) CHECK(d == 0.0);
        if (v.certain_disjoint) CHECK(d >= 0.0);
    }
}

TEST_CASE("epa on overlapping cubes") {
    const ConvexHull cube = unit_cube();
    Pose a;
    Pose b;
    b.translation = {0.9, 0, 0}; // 0.1 m overlap on X
    const Penetration p = epa_penetration(cube, a, cube, b);
    CHECK(p.depth == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(std::abs(p.normal.x) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(p.normal.y) < 1e-9);
    CHECK(std::abs(p.normal.z) < 1e-9);

    // disjoint input violates the precondition
    Pose far;
    far.translation = {5, 0, 0};
    CHECK_THROWS_AS(epa_penetration(cube, a, cube, far), std::invalid_argument);
}

TEST_CASE("epa coincident cubes tie-break") {
    const ConvexHull cube = unit_cube();
    const Pose a, b;
    const Penetration p = epa_penetration(cube, a, cube, b);
    CHECK(p.depth == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(p.normal.x) == doctest::Approx(1.0).epsilon(1e-9)); // lowest axis wins
}

TEST_CASE("epa separation property on random overlapping pairs") {
    Rng rng(43);
    int tested = 0;
    while (tested < 60) {
        const ConvexHull ha = convex_hull(
            box_points(rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)));
        const ConvexHull hb = random_ball_hull(rng, 30, rng.uniform(0.2, 0.8));
        const Pose pa{random_quat(rng), random_vec(rng, -0.3, 0.3)};
        const Pose pb{random_quat(rng), random_vec(rng, -0.3, 0.3)};
        if (gjk_distance(ha, pa, hb, pb) > 0.0) continue;
        ++tested;
        const Penetration p = epa_penetration(ha, pa, hb, pb);
        CHECK(p.depth > 0.0);
        CHECK(norm(p.normal) == doctest::Approx(1.0).epsilon(1e-9));
        Pose pb_moved = pb;
        pb_moved.translation += (p.depth + 1e-7) * p.normal;
        CHECK(gjk_distance(ha, pa, hb, pb_moved) >= 0.0);
        // hulls no longer meaningfully overlap after applying the vector
        CHECK_FALSE(hulls_intersect(ha, pa, hb, pb_moved));
    }
}

TEST_CASE("hulls_intersect contact vs penetration") {
    const ConvexHull cube = unit_cube();
    Pose bottom;
    Pose top;
    top.translation = {0, 1.0, 0}; // exact face contact
    CHECK_FALSE(hulls_intersect(cube, bottom, cube, top));

    top.translation = {0, 0.98, 0}; // 0.02 m sunk
    CHECK(hulls_intersect(cube, bottom, cube, top));
}

TEST_CASE("hulls_intersect ten-object scene vs sampling oracle") {
    Rng rng(47);
    std::vector<ConvexHull> hulls;
    std::vector<Pose> poses;
    for (int i = 0; i < 10; ++i) {
        hulls.push_back(convex_hull(
            box_points(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8))));
        poses.push_back({random_quat(rng), random_vec(rng, -1.0, 1.0)});
    }
    int checked = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = i + 1; j < 10; ++j) {
            const McVerdict v =
                mc_pair_verdict(rng, hulls[size_t(i)], poses[size_t(i)], hulls[size_t(j)],
                                poses[size_t(j)], 20000);
            if (!v.certain_intersect && !v.certain_disjoint) continue;
            ++checked;
            const bool got = hulls_intersect(hulls[size_t(i)], poses[size_t(i)], hulls[size_t(j)],
                                             poses[size_t(j)]);
            CHECK(got == v.certain_intersect);
        }
    }
    CHECK(checked >= 30); // nearly all pairs should be certain
}

TEST_CASE("aabb_of") {
    const ConvexHull cube = unit_cube();
    const Aabb at_identity = aabb_of(cube, Pose{});
    CHECK(at_identity.min.x == doctest::Approx(-0.5));
    CHECK(at_identity.max.z == doctest::Approx(0.5));

    Pose rot{UnitQuat::from_axis_angle({0, 1, 0}, kPi / 4), {0, 0, 0}};
    const Aabb rotated = aabb_of(cube, rot);
    CHECK(rotated.max.x == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-9));
    CHECK(rotated.max.y == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rotated.max.z == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-9));

    Rng rng(53);
    for (int i = 0; i < 20; ++i) {
        const ConvexHull h = random_ball_hull(rng, 40, 0.7);
        const Pose p{random_quat(rng), random_vec(rng, -2, 2)};
        const Aabb box = aabb_of(h, p);
        for (const Vec3& v : h.vertices) CHECK(box.contains(p.apply(v)));
    }
}

TEST_CASE("cube inertia sanity") {
    const ConvexHull cube = unit_cube();
    const auto inertia = cube.unit_inertia(6.0); // m s^2/6 = 1 for unit cube, mass 6
    CHECK(inertia[0][0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(inertia[1][1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(inertia[2][2] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(inertia[0][1]) < 1e-12);
}
