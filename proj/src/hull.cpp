#include "stablescene/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "stablescene/errors.hpp"

namespace stablescene {

int ConvexHull::support_index(const Vec3& dir) const {
    int best = 0;
    double best_dot = dot(vertices[0], dir);
    for (int i = 1; i < int(vertices.size()); ++i) {
        const double d = dot(vertices[size_t(i)], dir);
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return best;
}

Aabb ConvexHull::local_aabb() const {
    Aabb box;
    for (const Vec3& v : vertices) box.extend(v);
    return box;
}

double ConvexHull::max_plane_distance(const Vec3& p) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const HullFace& f : faces) worst = std::max(worst, f.plane.signed_distance(p));
    return worst;
}

bool ConvexHull::contains(const Vec3& p, double tol) const {
    for (const HullFace& f : faces)
        if (f.plane.signed_distance(p) > tol) return false;
    return true;
}

std::array<std::array<double, 3>, 3> ConvexHull::unit_inertia(double mass) const {
    // Accumulate second moments by decomposing into tetrahedra (origin, a, b, c).
    // Canonical-tet covariance: integral of x x^T over the unit tet is
    // det/120 * (A (1 + I) A^T) summed with the vertex products.
    double cov[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double vol = 0.0;
    Vec3 com{0, 0, 0};
    for (const auto& t : triangles) {
        const Vec3 a = vertices[size_t(t[0])];
        const Vec3 b = vertices[size_t(t[1])];
        const Vec3 c = vertices[size_t(t[2])];
        const double det = dot(a, cross(b, c));
        vol += det / 6.0;
        com += (det / 24.0) * (a + b + c);
        const Vec3 cols[3] = {a, b, c};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l)
                        s += cols[k][i] * cols[l][j] * (k == l ? 2.0 : 1.0);
                cov[i][j] += det / 120.0 * s;
            }
        }
    }
    com = com / vol;
    const double density = mass / vol;
    // Shift covariance to the centroid, then convert to inertia.
    double c2[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            c2[i][j] = density * cov[i][j] - mass * com[i] * com[j];
    const double tr = c2[0][0] + c2[1][1] + c2[2][2];
    std::array<std::array<double, 3>, 3> inertia{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            inertia[size_t(i)][size_t(j)] = (i == j ? tr : 0.0) - c2[i][j];
    return inertia;
}

Aabb aabb_of(const ConvexHull& hull, const Pose& pose) {
    Aabb box;
    for (const Vec3& v : hull.vertices) box.extend(pose.apply(v));
    return box;
}

namespace {

constexpr double kCoplanarTol = 1e-9;

struct QhFace {
    int v[3];
    Vec3 normal;       // unit
    double offset;     // dot(normal, x) = offset on the plane
    std::vector<int> outside;
    bool alive = true;
};

double plane_dist(const QhFace& f, const Vec3& p) { return dot(f.normal, p) - f.offset; }

QhFace make_face(const std::vector<Vec3>& pts, int a, int b, int c, const Vec3& interior) {
    QhFace f;
    f.v[0] = a;
    f.v[1] = b;
    f.v[2] = c;
    Vec3 n = cross(pts[size_t(b)] - pts[size_t(a)], pts[size_t(c)] - pts[size_t(a)]);
    const double len = norm(n);
    n = len > 0 ? n / len : Vec3{0, 0, 1};
    double off = dot(n, pts[size_t(a)]);
    if (dot(n, interior) - off > 0) { // flip to point away from the interior
        std::swap(f.v[1], f.v[2]);
        n = -n;
        off = -off;
    }
    f.normal = n;
    f.offset = off;
    return f;
}

// Initial tetrahedron from extreme points; throws when the set is degenerate.
std::array<int, 4> initial_tetrahedron(const std::vector<Vec3>& pts, double eps) {
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int i = 1; i < int(pts.size()); ++i) {
        for (int a = 0; a < 3; ++a) {
            if (pts[size_t(i)][a] < pts[size_t(lo[a])][a]) lo[a] = i;
            if (pts[size_t(i)][a] > pts[size_t(hi[a])][a]) hi[a] = i;
        }
    }
    int p0 = 0, p1 = 0;
    double best = -1.0;
    for (int a = 0; a < 3; ++a) {
        const double d = norm2(pts[size_t(hi[a])] - pts[size_t(lo[a])]);
        if (d > best) {
            best = d;
            p0 = lo[a];
            p1 = hi[a];
        }
    }
    if (best <= eps * eps) throw DegenerateGeometry("convex_hull: all points coincident");

    const Vec3 dirn = pts[size_t(p1)] - pts[size_t(p0)];
    int p2 = -1;
    best = eps;
    for (int i = 0; i < int(pts.size()); ++i) {
        const double d = norm(cross(dirn, pts[size_t(i)] - pts[size_t(p0)])) / norm(dirn);
        if (d > best) {
            best = d;
            p2 = i;
        }
    }
    if (p2 < 0) throw DegenerateGeometry("convex_hull: points are collinear");

    const Vec3 n = cross(dirn, pts[size_t(p2)] - pts[size_t(p0)]);
    int p3 = -1;
    best = eps;
    for (int i = 0; i < int(pts.size()); ++i) {
        const double d = std::abs(dot(normalized(n), pts[size_t(i)] - pts[size_t(p0)]));
        if (d > best) {
            best = d;
            p3 = i;
        }
    }
    if (p3 < 0) throw DegenerateGeometry("convex_hull: points are coplanar");
    return {p0, p1, p2, p3};
}

// Merge coplanar triangles into convex polygon loops for contact clipping.
std::vector<HullFace> merge_faces(const std::vector<Vec3>& verts,
                                  const std::vector<std::array<int, 3>>& tris) {
    struct Group {
        Vec3 normal;
        double offset;
        std::set<int> verts;
    };
    std::vector<Group> groups;
    const double ntol = 1e-8;
    for (const auto& t : tris) {
        const Vec3 a = verts[size_t(t[0])], b = verts[size_t(t[1])], c = verts[size_t(t[2])];
        const Vec3 n = normalized(cross(b - a, c - a));
        const double off = dot(n, a);
        Group* g = nullptr;
        for (Group& cand : groups) {
            if (norm(cand.normal - n) < ntol && std::abs(cand.offset - off) < ntol) {
                g = &cand;
                break;
            }
        }
        if (!g) {
            groups.push_back({n, off, {}});
            g = &groups.back();
        }
        g->verts.insert(t.begin(), t.end());
    }

    std::vector<HullFace> out;
    out.reserve(groups.size());
    for (const Group& g : groups) {
        // Order the (convex) face vertices by angle around the face centroid.
        Vec3 centroid{0, 0, 0};
        for (int vi : g.verts) centroid += verts[size_t(vi)];
        centroid = centroid / double(g.verts.size());
        Vec3 u = std::abs(g.normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        u = normalized(cross(g.normal, u));
        const Vec3 v = cross(g.normal, u);
        std::vector<std::pair<double, int>> order;
        order.reserve(g.verts.size());
        for (int vi : g.verts) {
            const Vec3 d = verts[size_t(vi)] - centroid;
            order.emplace_back(std::atan2(dot(d, v), dot(d, u)), vi);
        }
        std::sort(order.begin(), order.end());
        HullFace f;
        f.plane = {g.normal, g.offset};
        for (const auto& [ang, vi] : order) f.loop.push_back(vi);
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace

ConvexHull convex_hull(const std::vector<Vec3>& points) {
    if (points.size() < 4) throw DegenerateGeometry("convex_hull: need at least 4 points");
    for (const Vec3& p : points)
        if (!p.finite()) throw DegenerateGeometry("convex_hull: non-finite input point");

    // Scale-relative epsilon keeps behaviour consistent for mm- and m-sized hulls.
    Aabb box;
    for (const Vec3& p : points) box.extend(p);
    const double scale = std::max({box.extent().x, box.extent().y, box.extent().z, 1e-12});
    const double eps = std::max(kCoplanarTol, 1e-12 * scale);

    const auto tet = initial_tetrahedron(points, eps);
    Vec3 interior = 0.25 * (points[size_t(tet[0])] + points[size_t(tet[1])] +
                            points[size_t(tet[2])] + points[size_t(tet[3])]);

    std::vector<QhFace> faces;
    faces.push_back(make_face(points, tet[0], tet[1], tet[2], interior));
    faces.push_back(make_face(points, tet[0], tet[1], tet[3], interior));
    faces.push_back(make_face(points, tet[0], tet[2], tet[3], interior));
    faces.push_back(make_face(points, tet[1], tet[2], tet[3], interior));

    for (int i = 0; i < int(points.size()); ++i) {
        for (QhFace& f : faces) {
            if (plane_dist(f, points[size_t(i)]) > eps) {
                f.outside.push_back(i);
                break;
            }
        }
    }

    while (true) {
        int fi = -1;
        for (int i = 0; i < int(faces.size()); ++i) {
            if (faces[size_t(i)].alive && !faces[size_t(i)].outside.empty()) {
                fi = i;
                break;
            }
        }
        if (fi < 0) break;

        QhFace& f = faces[size_t(fi)];
        int apex = f.outside[0];
        double apex_d = plane_dist(f, points[size_t(apex)]);
        for (int cand : f.outside) {
            const double d = plane_dist(f, points[size_t(cand)]);
            if (d > apex_d) {
                apex_d = d;
                apex = cand;
            }
        }

        // Visible set and horizon edges.
        std::vector<int> visible;
        std::vector<char> is_visible(faces.size(), 0);
        for (int i = 0; i < int(faces.size()); ++i) {
            if (faces[size_t(i)].alive && plane_dist(faces[size_t(i)], points[size_t(apex)]) > eps) {
                visible.push_back(i);
                is_visible[size_t(i)] = 1;
            }
        }
        std::map<std::pair<int, int>, int> edge_count;
        for (int vi : visible) {
            const QhFace& vf = faces[size_t(vi)];
            for (int e = 0; e < 3; ++e) {
                int a = vf.v[e], b = vf.v[(e + 1) % 3];
                auto key = std::minmax(a, b);
                edge_count[{key.first, key.second}]++;
            }
        }
        std::vector<std::pair<int, int>> horizon;
        for (int vi : visible) {
            const QhFace& vf = faces[size_t(vi)];
            for (int e = 0; e < 3; ++e) {
                int a = vf.v[e], b = vf.v[(e + 1) % 3];
                auto key = std::minmax(a, b);
                if (edge_count[{key.first, key.second}] == 1) horizon.emplace_back(a, b);
            }
        }

        std::vector<int> orphans;
        for (int vi : visible) {
            QhFace& vf = faces[size_t(vi)];
            vf.alive = false;
            orphans.insert(orphans.end(), vf.outside.begin(), vf.outside.end());
            vf.outside.clear();
        }

        std::vector<int> new_faces;
        for (const auto& [a, b] : horizon) {
            faces.push_back(make_face(points, a, b, apex, interior));
            new_faces.push_back(int(faces.size()) - 1);
        }
        for (int pi : orphans) {
            if (pi == apex) continue;
            for (int nf : new_faces) {
                if (plane_dist(faces[size_t(nf)], points[size_t(pi)]) > eps) {
                    faces[size_t(nf)].outside.push_back(pi);
                    break;
                }
            }
        }
    }

    // Compact: referenced vertices only, stable input order.
    std::vector<int> remap(points.size(), -1);
    ConvexHull hull;
    for (const QhFace& f : faces) {
        if (!f.alive) continue;
        for (int e = 0; e < 3; ++e) {
            if (remap[size_t(f.v[e])] < 0) {
                remap[size_t(f.v[e])] = int(hull.vertices.size());
                hull.vertices.push_back(points[size_t(f.v[e])]);
            }
        }
    }
    for (const QhFace& f : faces) {
        if (!f.alive) continue;
        hull.triangles.push_back(
            {remap[size_t(f.v[0])], remap[size_t(f.v[1])], remap[size_t(f.v[2])]});
    }

    double vol = 0.0;
    Vec3 com{0, 0, 0};
    for (const auto& t : hull.triangles) {
        const Vec3 a = hull.vertices[size_t(t[0])];
        const Vec3 b = hull.vertices[size_t(t[1])];
        const Vec3 c = hull.vertices[size_t(t[2])];
        const double det = dot(a, cross(b, c));
        vol += det / 6.0;
        com += (det / 24.0) * (a + b + c);
    }
    if (vol <= 0.0) throw DegenerateGeometry("convex_hull: non-positive volume");
    hull.volume = vol;
    hull.centroid = com / vol;
    hull.faces = merge_faces(hull.vertices, hull.triangles);
    return hull;
}

} // namespace stablescene
