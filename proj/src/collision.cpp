#include "stablescene/collision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace stablescene {

namespace {

struct SupportPoint {
    Vec3 w;  // Minkowski difference point (A - B)
    Vec3 sa; // source point on A, world frame
    Vec3 sb; // source point on B, world frame
};

struct Shape {
    const ConvexHull* hull;
    Pose pose;
    UnitQuat inv_rot;

    Vec3 support(const Vec3& world_dir) const {
        return pose.apply(hull->support(inv_rot.rotate(world_dir)));
    }
};

SupportPoint cso_support(const Shape& a, const Shape& b, const Vec3& dir) {
    SupportPoint s;
    s.sa = a.support(dir);
    s.sb = b.support(-dir);
    s.w = s.sa - s.sb;
    return s;
}

using Simplex = std::vector<SupportPoint>;

// --- closest point of the simplex to the origin (Ericson-style regions) ---

struct SimplexSolution {
    Vec3 closest;
    std::array<double, 4> bary{};
    int count = 0;    // entries retained after reduction
    bool contains = false;
};

SimplexSolution solve_point(const Simplex& s) {
    SimplexSolution out;
    out.closest = s[0].w;
    out.bary = {1, 0, 0, 0};
    out.count = 1;
    return out;
}

SimplexSolution solve_segment(Simplex& s) {
    const Vec3 a = s[0].w, b = s[1].w;
    const Vec3 ab = b - a;
    const double denom = dot(ab, ab);
    double t = denom > 0 ? dot(-a, ab) / denom : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    SimplexSolution out;
    if (t <= 0.0) {
        s.resize(1);
        out = solve_point(s);
    } else if (t >= 1.0) {
        s[0] = s[1];
        s.resize(1);
        out = solve_point(s);
    } else {
        out.closest = a + t * ab;
        out.bary = {1.0 - t, t, 0, 0};
        out.count = 2;
    }
    return out;
}

SimplexSolution solve_triangle(Simplex& s) {
    const Vec3 a = s[0].w, b = s[1].w, c = s[2].w;
    const Vec3 ab = b - a, ac = c - a;
    const Vec3 ap = -a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    SimplexSolution out;
    if (d1 <= 0.0 && d2 <= 0.0) { // vertex A
        s.resize(1);
        return solve_point(s);
    }
    const Vec3 bp = -b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) { // vertex B
        s[0] = s[1];
        s.resize(1);
        return solve_point(s);
    }
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) { // edge AB
        s.resize(2);
        return solve_segment(s);
    }
    const Vec3 cp = -c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) { // vertex C
        s[0] = s[2];
        s.resize(1);
        return solve_point(s);
    }
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) { // edge AC
        s[1] = s[2];
        s.resize(2);
        return solve_segment(s);
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) { // edge BC
        s[0] = s[1];
        s[1] = s[2];
        s.resize(2);
        return solve_segment(s);
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    out.closest = a + v * ab + w * ac;
    out.bary = {1.0 - v - w, v, w, 0};
    out.count = 3;
    return out;
}

SimplexSolution solve_tetrahedron(Simplex& s) {
    const Vec3 a = s[0].w, b = s[1].w, c = s[2].w, d = s[3].w;

    auto outside = [](const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& opp) {
        const Vec3 n = cross(p1 - p0, p2 - p0);
        const double signp = dot(n, -p0);
        const double signd = dot(n, opp - p0);
        return signp * signd < 0.0;
    };

    const bool out_abc = outside(a, b, c, d);
    const bool out_acd = outside(a, c, d, b);
    const bool out_adb = outside(a, d, b, c);
    const bool out_bdc = outside(b, d, c, a);

    if (!out_abc && !out_acd && !out_adb && !out_bdc) {
        SimplexSolution sol;
        sol.contains = true;
        sol.count = 4;
        sol.closest = Vec3{0, 0, 0};
        return sol;
    }

    SimplexSolution best;
    double best_d2 = std::numeric_limits<double>::infinity();
    Simplex best_simplex;
    auto consider = [&](int i0, int i1, int i2) {
        Simplex tri{s[size_t(i0)], s[size_t(i1)], s[size_t(i2)]};
        SimplexSolution sol = solve_triangle(tri);
        const double d2 = norm2(sol.closest);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = sol;
            best_simplex = tri;
        }
    };
    if (out_abc) consider(0, 1, 2);
    if (out_acd) consider(0, 2, 3);
    if (out_adb) consider(0, 3, 1);
    if (out_bdc) consider(1, 3, 2);
    s = best_simplex;
    return best;
}

SimplexSolution solve_simplex(Simplex& s) {
    switch (s.size()) {
        case 1: return solve_point(s);
        case 2: return solve_segment(s);
        case 3: return solve_triangle(s);
        default: return solve_tetrahedron(s);
    }
}

struct GjkResult {
    double distance = 0.0;
    bool overlapping = false;
    Vec3 point_a, point_b;
    Simplex simplex; // terminal simplex, seed for EPA when overlapping
};

double query_scale(const Shape& a, const Shape& b) {
    const Aabb ba = aabb_of(*a.hull, a.pose);
    const Aabb bb = aabb_of(*b.hull, b.pose);
    Aabb u = ba;
    u.extend(bb);
    const Vec3 e = u.extent();
    return std::max({e.x, e.y, e.z, 1.0});
}

GjkResult gjk(const Shape& a, const Shape& b) {
    const double scale = query_scale(a, b);
    const double eps_rel = 1e-12;
    const double eps_abs2 = 1e-24 * scale * scale;

    Vec3 dir = b.pose.translation - a.pose.translation;
    if (norm2(dir) < 1e-24) dir = Vec3{1, 0, 0};

    GjkResult res;
    Simplex s;
    s.push_back(cso_support(a, b, dir));
    Vec3 v = s[0].w;
    std::array<double, 4> bary{1, 0, 0, 0};

    for (int iter = 0; iter < 64; ++iter) {
        const double v2 = norm2(v);
        if (v2 <= eps_abs2) {
            res.overlapping = true;
            res.simplex = s;
            return res;
        }
        const SupportPoint w = cso_support(a, b, -v);
        // no further progress toward the origin
        if (v2 - dot(v, w.w) <= eps_rel * v2) break;
        bool duplicate = false;
        for (const SupportPoint& e : s)
            if (norm2(e.w - w.w) <= 1e-28 * scale * scale) duplicate = true;
        if (duplicate) break;

        s.push_back(w);
        SimplexSolution sol = solve_simplex(s);
        if (sol.contains) {
            res.overlapping = true;
            res.simplex = s;
            return res;
        }
        v = sol.closest;
        bary = sol.bary;
    }

    res.distance = norm(v);
    if (res.distance <= 1e-10 * scale) {
        // touching within numerical noise counts as contact
        res.overlapping = true;
        res.distance = 0.0;
        res.simplex = s;
        return res;
    }
    res.point_a = Vec3{0, 0, 0};
    res.point_b = Vec3{0, 0, 0};
    for (size_t i = 0; i < s.size(); ++i) {
        res.point_a += bary[i] * s[i].sa;
        res.point_b += bary[i] * s[i].sb;
    }
    res.simplex = s;
    return res;
}

// ---------------------------------------------------------------- EPA ---

struct EpaFace {
    int v[3];
    Vec3 normal;  // unit, outward
    double dist;  // plane distance from origin along normal
    bool alive = true;
};

bool make_epa_face(const std::vector<SupportPoint>& verts, int i0, int i1, int i2,
                   const Vec3& interior, EpaFace& out) {
    const Vec3 a = verts[size_t(i0)].w, b = verts[size_t(i1)].w, c = verts[size_t(i2)].w;
    Vec3 n = cross(b - a, c - a);
    const double len = norm(n);
    if (len < 1e-18) return false;
    n = n / len;
    int v0 = i0, v1 = i1, v2 = i2;
    if (dot(n, a - interior) < 0) {
        std::swap(v1, v2);
        n = -n;
    }
    out.v[0] = v0;
    out.v[1] = v1;
    out.v[2] = v2;
    out.normal = n;
    out.dist = dot(n, a);
    return true;
}

// Grow a sub-dimensional GJK terminal simplex to a tetrahedron for EPA.
void blow_up_simplex(const Shape& a, const Shape& b, Simplex& s) {
    static const Vec3 axes[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                 {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    auto has_point = [&](const Vec3& w) {
        for (const SupportPoint& e : s)
            if (norm2(e.w - w) < 1e-24) return true;
        return false;
    };
    auto affinely_independent = [&]() {
        if (s.size() < 4) return false;
        const Vec3 d1 = s[1].w - s[0].w, d2 = s[2].w - s[0].w, d3 = s[3].w - s[0].w;
        return std::abs(dot(d1, cross(d2, d3))) > 1e-20;
    };
    // Try axis supports first, then perpendiculars of existing features.
    for (const Vec3& d : axes) {
        if (s.size() >= 4 && affinely_independent()) return;
        SupportPoint w = cso_support(a, b, d);
        if (!has_point(w.w)) s.push_back(w);
        if (s.size() > 4) {
            // keep a non-degenerate 4-subset: drop the point closest to the
            // plane/line spanned by the others
            Simplex best;
            double best_vol = -1.0;
            const size_t n = s.size();
            for (size_t skip = 0; skip < n; ++skip) {
                Simplex cand;
                for (size_t i = 0; i < n; ++i)
                    if (i != skip) cand.push_back(s[i]);
                if (cand.size() != 4) continue;
                const Vec3 d1 = cand[1].w - cand[0].w, d2 = cand[2].w - cand[0].w,
                           d3 = cand[3].w - cand[0].w;
                const double vol = std::abs(dot(d1, cross(d2, d3)));
                if (vol > best_vol) {
                    best_vol = vol;
                    best = cand;
                }
            }
            s = best;
        }
    }
}

int dominant_axis(const Vec3& n) {
    const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
    if (ax >= ay && ax >= az) return 0;
    if (ay >= az) return 1;
    return 2;
}

// Prefer lower axis index among (near-)equidistant faces; keeps symmetric
// overlaps deterministic.
bool face_preferred(const EpaFace& cand, const EpaFace& best) {
    if (cand.dist < best.dist - 1e-9) return true;
    if (cand.dist > best.dist + 1e-9) return false;
    const int ca = dominant_axis(cand.normal), ba = dominant_axis(best.normal);
    if (ca != ba) return ca < ba;
    return std::abs(cand.normal[ca]) > std::abs(best.normal[ba]);
}

Penetration epa(const Shape& a, const Shape& b, Simplex seed) {
    const double scale = query_scale(a, b);
    const double eps_grow = 1e-10 * scale;

    if (seed.size() < 4) blow_up_simplex(a, b, seed);
    if (seed.size() < 4) throw std::runtime_error("epa: failed to build initial simplex");

    std::vector<SupportPoint> verts(seed.begin(), seed.end());
    Vec3 interior{0, 0, 0};
    for (const SupportPoint& v : verts) interior += v.w;
    interior = interior / double(verts.size());

    std::vector<EpaFace> faces;
    const int tet[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (const auto& t : tet) {
        EpaFace f;
        if (make_epa_face(verts, t[0], t[1], t[2], interior, f)) faces.push_back(f);
    }
    if (faces.size() < 4) throw std::runtime_error("epa: degenerate initial polytope");

    Penetration best{std::numeric_limits<double>::infinity(), Vec3{0, 0, 1}};
    for (int iter = 0; iter < 256; ++iter) {
        int fi = -1;
        for (int i = 0; i < int(faces.size()); ++i) {
            if (!faces[size_t(i)].alive) continue;
            if (fi < 0 || face_preferred(faces[size_t(i)], faces[size_t(fi)])) fi = i;
        }
        if (fi < 0) break;
        const EpaFace f = faces[size_t(fi)];
        const SupportPoint w = cso_support(a, b, f.normal);
        const double grow = dot(f.normal, w.w) - f.dist;
        if (grow <= eps_grow) {
            best.depth = std::max(f.dist, 0.0);
            best.normal = f.normal;
            return best;
        }

        // carve visible faces, stitch horizon
        const int wi = int(verts.size());
        verts.push_back(w);
        std::map<std::pair<int, int>, int> edge_count;
        for (EpaFace& ef : faces) {
            if (!ef.alive) continue;
            if (dot(ef.normal, w.w) - ef.dist > 1e-12 * scale) {
                ef.alive = false;
                for (int e = 0; e < 3; ++e) {
                    const auto key = std::minmax(ef.v[e], ef.v[(e + 1) % 3]);
                    edge_count[{key.first, key.second}]++;
                }
            }
        }
        bool added = false;
        std::vector<EpaFace> new_faces;
        for (const auto& [edge, count] : edge_count) {
            if (count != 1) continue;
            EpaFace nf;
            if (make_epa_face(verts, edge.first, edge.second, wi, interior, nf)) {
                new_faces.push_back(nf);
                added = true;
            }
        }
        if (!added) { // numerical stall: report the current nearest face
            best.depth = std::max(f.dist, 0.0);
            best.normal = f.normal;
            return best;
        }
        faces.insert(faces.end(), new_faces.begin(), new_faces.end());
    }

    // iteration cap: return the nearest face seen
    int fi = -1;
    for (int i = 0; i < int(faces.size()); ++i) {
        if (!faces[size_t(i)].alive) continue;
        if (fi < 0 || face_preferred(faces[size_t(i)], faces[size_t(fi)])) fi = i;
    }
    best.depth = std::max(faces[size_t(fi)].dist, 0.0);
    best.normal = faces[size_t(fi)].normal;
    return best;
}

Shape make_shape(const ConvexHull& h, const Pose& p) {
    return Shape{&h, p, p.rotation.conjugate()};
}

} // namespace

double gjk_distance(const ConvexHull& a, const Pose& pose_a, const ConvexHull& b,
                    const Pose& pose_b) {
    const GjkResult r = gjk(make_shape(a, pose_a), make_shape(b, pose_b));
    return r.overlapping ? 0.0 : r.distance;
}

ClosestPoints gjk_closest(const ConvexHull& a, const Pose& pose_a, const ConvexHull& b,
                          const Pose& pose_b) {
    const GjkResult r = gjk(make_shape(a, pose_a), make_shape(b, pose_b));
    ClosestPoints out;
    out.overlapping = r.overlapping;
    out.distance = r.overlapping ? 0.0 : r.distance;
    out.point_a = r.point_a;
    out.point_b = r.point_b;
    return out;
}

Penetration epa_penetration(const ConvexHull& a, const Pose& pose_a, const ConvexHull& b,
                            const Pose& pose_b) {
    const Shape sa = make_shape(a, pose_a);
    const Shape sb = make_shape(b, pose_b);
    GjkResult r = gjk(sa, sb);
    if (!r.overlapping)
        throw std::invalid_argument("epa_penetration: hulls are disjoint (gjk_distance > 0)");
    return epa(sa, sb, std::move(r.simplex));
}

bool hulls_intersect(const ConvexHull& a, const Pose& pose_a, const ConvexHull& b,
                     const Pose& pose_b) {
    if (!aabb_of(a, pose_a).overlaps(aabb_of(b, pose_b))) return false;
    const Shape sa = make_shape(a, pose_a);
    const Shape sb = make_shape(b, pose_b);
    GjkResult r = gjk(sa, sb);
    if (!r.overlapping) return false;
    const Penetration p = epa(sa, sb, std::move(r.simplex));
    return p.depth > kContactEpsilon;
}

} // namespace stablescene
