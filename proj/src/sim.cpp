#include "stablescene/sim.hpp"

#include <algorithm>
#include <cmath>

#include "stablescene/collision.hpp"
#include "stablescene/errors.hpp"

namespace stablescene {

void SimConfig::validate() const {
    auto bad = [](const std::string& what) {
        throw ValidationError(ValidationCode::BadField, "", "sim config: " + what);
    };
    if (!(dt > 0.0)) bad("dt must be > 0");
    if (substeps < 1) bad("substeps must be >= 1");
    if (steps < 1) bad("steps must be >= 1");
    if (vel_probe <= 0 || vel_probe > steps) bad("vel_probe must be in (0, steps]");
    if (lin_damping < 0.0 || lin_damping > 1.0) bad("lin_damping must be in [0,1]");
    if (ang_damping < 0.0 || ang_damping > 1.0) bad("ang_damping must be in [0,1]");
    if (friction < 0.0) bad("friction must be >= 0");
    if (restitution < 0.0 || restitution > 1.0) bad("restitution must be in [0,1]");
    if (contact_offset < 0.0) bad("contact_offset must be >= 0");
    if (max_depenetration_vel <= 0.0) bad("max_depenetration_vel must be > 0");
    if (solver_iterations < 1) bad("solver_iterations must be >= 1");
}

namespace {

constexpr double kBaumgarte = 0.2;

struct Mat3 {
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    static Mat3 from_quat(const UnitQuat& q) {
        Mat3 r;
        const auto a = q.to_matrix();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = a[size_t(i)][size_t(j)];
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
            a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
            a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r.m[i][j] += a.m[i][k] * b.m[k][j];
    return r;
}

Mat3 inverse(const Mat3& a) {
    Mat3 r;
    const double* m0 = a.m[0];
    const double* m1 = a.m[1];
    const double* m2 = a.m[2];
    const double c00 = m1[1] * m2[2] - m1[2] * m2[1];
    const double c01 = m1[2] * m2[0] - m1[0] * m2[2];
    const double c02 = m1[0] * m2[1] - m1[1] * m2[0];
    const double det = m0[0] * c00 + m0[1] * c01 + m0[2] * c02;
    const double inv = 1.0 / det;
    r.m[0][0] = c00 * inv;
    r.m[1][0] = c01 * inv;
    r.m[2][0] = c02 * inv;
    r.m[0][1] = (m0[2] * m2[1] - m0[1] * m2[2]) * inv;
    r.m[1][1] = (m0[0] * m2[2] - m0[2] * m2[0]) * inv;
    r.m[2][1] = (m0[1] * m2[0] - m0[0] * m2[1]) * inv;
    r.m[0][2] = (m0[1] * m1[2] - m0[2] * m1[1]) * inv;
    r.m[1][2] = (m0[2] * m1[0] - m0[0] * m1[2]) * inv;
    r.m[2][2] = (m0[0] * m1[1] - m0[1] * m1[0]) * inv;
    return r;
}

struct RigidBody {
    std::string id;
    const SceneObject* obj = nullptr;
    bool dynamic = true;

    Pose pose;
    Vec3 com_world;
    Vec3 v, w;

    double inv_mass = 0.0;
    Vec3 com_body;
    Mat3 inv_inertia_body;
    Mat3 inv_inertia_world;

    Aabb world_aabb;

    void refresh_derived() {
        com_world = pose.apply(com_body);
        if (dynamic) {
            const Mat3 r = Mat3::from_quat(pose.rotation);
            inv_inertia_world = r * inv_inertia_body * r.transposed();
        }
        world_aabb = Aabb{};
        for (const ConvexHull& h : obj->hulls) world_aabb.extend(aabb_of(h, pose));
    }
};

// Mass, COM, and inertia from the convex pieces at uniform density.
void compute_mass_properties(RigidBody& body) {
    const SceneObject& obj = *body.obj;
    const double total_volume = obj.hull_volume();
    Vec3 com{0, 0, 0};
    for (const ConvexHull& h : obj.hulls) com += (h.volume / total_volume) * h.centroid;
    Mat3 inertia;
    for (const ConvexHull& h : obj.hulls) {
        const double piece_mass = obj.mass * h.volume / total_volume;
        const auto pi = h.unit_inertia(piece_mass);
        const Vec3 d = h.centroid - com;
        const double d2 = norm2(d);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                inertia.m[i][j] += pi[size_t(i)][size_t(j)];
                inertia.m[i][j] += piece_mass * ((i == j ? d2 : 0.0) - d[i] * d[j]);
            }
        }
    }
    body.inv_mass = 1.0 / obj.mass;
    body.com_body = com;
    body.inv_inertia_body = inverse(inertia);
}

struct ContactPoint {
    Vec3 point;
    double separation = 0.0; // < 0 penetrating
    double jn = 0.0, jt1 = 0.0, jt2 = 0.0;
    Vec3 ra, rb;
    double mass_n = 0.0, mass_t1 = 0.0, mass_t2 = 0.0;
    double bias = 0.0;
};

struct Manifold {
    int a = -1; // -1 = ground plane
    int b = -1;
    Vec3 normal; // from A to B
    Vec3 t1, t2;
    std::vector<ContactPoint> points;
    // centroid block pre-solve scratch
    Vec3 center, cra, crb;
    double mass_c = 0.0;
    double bias_c = 0.0;
};

void tangent_basis(const Vec3& n, Vec3& t1, Vec3& t2) {
    const Vec3 ref = std::abs(n.y) < 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
    t1 = normalized(cross(n, ref));
    t2 = cross(n, t1);
}

// Reference-face clipping manifold for a hull pair along direction n
// (from A to B). Falls back to a single support midpoint for edge cases.
void clip_hull_pair(const ConvexHull& ha, const Pose& pa, const ConvexHull& hb, const Pose& pb,
                    const Vec3& n, double contact_offset, Manifold& out) {
    double best_a = -2.0, best_b = -2.0;
    const HullFace* face_a = nullptr;
    const HullFace* face_b = nullptr;
    for (const HullFace& f : ha.faces) {
        const double d = dot(pa.rotation.rotate(f.plane.normal), n);
        if (d > best_a) {
            best_a = d;
            face_a = &f;
        }
    }
    for (const HullFace& f : hb.faces) {
        const double d = dot(pb.rotation.rotate(f.plane.normal), -n);
        if (d > best_b) {
            best_b = d;
            face_b = &f;
        }
    }

    const bool ref_on_a = best_a >= best_b;
    const ConvexHull& ref_hull = ref_on_a ? ha : hb;
    const Pose& ref_pose = ref_on_a ? pa : pb;
    const ConvexHull& inc_hull = ref_on_a ? hb : ha;
    const Pose& inc_pose = ref_on_a ? pb : pa;

    const HullFace* ref_face = ref_on_a ? face_a : face_b;
    const Vec3 ref_n = ref_pose.rotation.rotate(ref_face->plane.normal);
    const double ref_off =
        dot(ref_n, ref_pose.apply(ref_hull.vertices[size_t(ref_face->loop[0])]));

    // incident face: most anti-parallel to the reference normal
    const HullFace* inc_face = nullptr;
    double best_inc = 2.0;
    for (const HullFace& f : inc_hull.faces) {
        const double d = dot(inc_pose.rotation.rotate(f.plane.normal), ref_n);
        if (d < best_inc) {
            best_inc = d;
            inc_face = &f;
        }
    }

    std::vector<Vec3> poly;
    poly.reserve(inc_face->loop.size());
    for (int vi : inc_face->loop) poly.push_back(inc_pose.apply(inc_hull.vertices[size_t(vi)]));

    const size_t ref_count = ref_face->loop.size();
    for (size_t i = 0; i < ref_count && !poly.empty(); ++i) {
        const Vec3 e0 = ref_pose.apply(ref_hull.vertices[size_t(ref_face->loop[i])]);
        const Vec3 e1 =
            ref_pose.apply(ref_hull.vertices[size_t(ref_face->loop[(i + 1) % ref_count])]);
        const Vec3 side_n = normalized(cross(ref_n, e1 - e0)); // points inward
        const double side_off = dot(side_n, e0);
        std::vector<Vec3> clipped;
        const size_t pn = poly.size();
        for (size_t k = 0; k < pn; ++k) {
            const Vec3& cur = poly[k];
            const Vec3& nxt = poly[(k + 1) % pn];
            const double dc = dot(side_n, cur) - side_off;
            const double dn = dot(side_n, nxt) - side_off;
            if (dc >= 0.0) clipped.push_back(cur);
            if ((dc >= 0.0) != (dn >= 0.0))
                clipped.push_back(cur + (dc / (dc - dn)) * (nxt - cur));
        }
        poly.swap(clipped);
    }

    const Vec3 out_n = ref_on_a ? ref_n : -ref_n;
    out.normal = out_n;
    for (const Vec3& p : poly) {
        const double sep = dot(ref_n, p) - ref_off;
        if (sep > contact_offset) continue;
        ContactPoint cp;
        cp.point = p - 0.5 * sep * ref_n; // split the gap between the faces
        cp.separation = sep;
        out.points.push_back(cp);
    }

    if (out.points.empty()) {
        // edge-edge or grazing: single deepest support midpoint
        const Vec3 sa = pa.apply(ha.support(pa.rotation.conjugate().rotate(n)));
        const Vec3 sb = pb.apply(hb.support(pb.rotation.conjugate().rotate(-n)));
        ContactPoint cp;
        cp.point = 0.5 * (sa + sb);
        cp.separation = dot(sb - sa, n);
        out.normal = n;
        if (cp.separation <= contact_offset) out.points.push_back(cp);
    }

    if (out.points.size() > 8) {
        std::sort(out.points.begin(), out.points.end(),
                  [](const ContactPoint& x, const ContactPoint& y) {
                      return x.separation < y.separation;
                  });
        out.points.resize(8);
    }
    tangent_basis(out.normal, out.t1, out.t2);
}

class Simulator {
public:
    Simulator(const Scene& scene, const Layout& layout, const std::set<std::string>& fixed_ids,
              const SimConfig& config, const std::vector<std::string>& include_ids)
        : config_(config) {
        config_.validate();
        std::vector<std::string> ids = include_ids.empty() ? scene.ids() : include_ids;
        std::sort(ids.begin(), ids.end());
        for (const std::string& id : ids) {
            RigidBody body;
            body.id = id;
            body.obj = &scene.object(id);
            body.pose = layout.at(id);
            body.dynamic = body.obj->movable && !fixed_ids.count(id);
            if (body.dynamic) compute_mass_properties(body);
            body.refresh_derived();
            bodies_.push_back(std::move(body));
        }
    }

    SimTrace run(const StepObserver& observer) {
        SimTrace trace;
        for (const RigidBody& b : bodies_) {
            trace.initial[b.id] = state_of(b);
            trace.peak_lin_vel[b.id] = 0.0;
            trace.peak_ang_vel[b.id] = 0.0;
        }
        emit(observer, 0);

        const double dt_sub = config_.dt / config_.substeps;
        for (int step = 1; step <= config_.steps; ++step) {
            for (int sub = 0; sub < config_.substeps; ++sub) substep(dt_sub, step);
            for (const RigidBody& b : bodies_) {
                if (!b.dynamic) continue;
                trace.peak_lin_vel[b.id] = std::max(trace.peak_lin_vel[b.id], norm(b.v));
                trace.peak_ang_vel[b.id] = std::max(trace.peak_ang_vel[b.id], norm(b.w));
            }
            if (step == config_.vel_probe)
                for (const RigidBody& b : bodies_) trace.probe[b.id] = state_of(b);
            emit(observer, step);
        }
        for (const RigidBody& b : bodies_) trace.final_state[b.id] = state_of(b);
        return trace;
    }

private:
    BodyState state_of(const RigidBody& b) const { return {b.pose, b.v, b.w, b.dynamic}; }

    void emit(const StepObserver& observer, int step) const {
        if (!observer) return;
        for (const RigidBody& b : bodies_) observer(step, b.id, state_of(b));
    }

    void substep(double h, int step) {
        for (RigidBody& b : bodies_) {
            if (!b.dynamic) continue;
            b.v += h * config_.gravity;
            b.v *= std::max(0.0, 1.0 - config_.lin_damping * h);
            b.w *= std::max(0.0, 1.0 - config_.ang_damping * h);
        }

        build_manifolds(h);
        prepare_contacts(h);
        warm_start();
        for (int it = 0; it < config_.solver_iterations; ++it) solve_iteration();
        integrate(h, step);
        cache_impulses();
    }

    void build_manifolds(double h) {
        manifolds_.clear();
        const double off = config_.contact_offset;

        // hull pairs first, ground last: support friction then sees the
        // post-push velocities, so heavy bodies are not dragged by
        // depenetration impulses their ground friction should resist
        for (int i = 0; i < int(bodies_.size()); ++i) {
            for (int j = i + 1; j < int(bodies_.size()); ++j) {
                RigidBody& a = bodies_[size_t(i)];
                RigidBody& b = bodies_[size_t(j)];
                if (!a.dynamic && !b.dynamic) continue;
                if (!a.world_aabb.inflated(off).overlaps(b.world_aabb)) continue;
                for (const ConvexHull& ha : a.obj->hulls) {
                    const Aabb box_a = aabb_of(ha, a.pose).inflated(off);
                    for (const ConvexHull& hb : b.obj->hulls) {
                        if (!box_a.overlaps(aabb_of(hb, b.pose))) continue;
                        collide_pair(i, j, ha, hb);
                    }
                }
            }
        }

        for (int bi = 0; bi < int(bodies_.size()); ++bi) {
            RigidBody& b = bodies_[size_t(bi)];
            if (!b.dynamic) continue;
            // widen by the per-substep fall distance so fast bodies cannot
            // tunnel through the plane between substeps
            const double reach = off + std::max(0.0, -b.v.y) * h;
            if (b.world_aabb.min.y > reach) continue;
            Manifold m;
            m.a = -1;
            m.b = bi;
            m.normal = {0, 1, 0};
            for (const ConvexHull& hull : b.obj->hulls) {
                for (const Vec3& v : hull.vertices) {
                    const Vec3 p = b.pose.apply(v);
                    if (p.y <= reach) {
                        ContactPoint cp;
                        cp.point = p;
                        cp.separation = p.y;
                        m.points.push_back(cp);
                    }
                }
            }
            if (m.points.empty()) continue;
            if (m.points.size() > 8) {
                std::sort(m.points.begin(), m.points.end(),
                          [](const ContactPoint& x, const ContactPoint& y) {
                              return x.separation < y.separation;
                          });
                m.points.resize(8);
            }
            tangent_basis(m.normal, m.t1, m.t2);
            manifolds_.push_back(std::move(m));
        }
    }

    void collide_pair(int i, int j, const ConvexHull& ha, const ConvexHull& hb) {
        RigidBody& a = bodies_[size_t(i)];
        RigidBody& b = bodies_[size_t(j)];
        const ClosestPoints cp = gjk_closest(ha, a.pose, hb, b.pose);
        Vec3 n;
        if (cp.overlapping) {
            const Penetration pen = epa_penetration(ha, a.pose, hb, b.pose);
            n = pen.normal; // translating B along +n separates: from A toward B
        } else {
            if (cp.distance > config_.contact_offset) return;
            n = cp.point_b - cp.point_a;
            if (norm2(n) < 1e-24) return;
            n = normalized(n);
        }
        Manifold m;
        m.a = i;
        m.b = j;
        clip_hull_pair(ha, a.pose, hb, b.pose, n, config_.contact_offset, m);
        if (!m.points.empty()) manifolds_.push_back(std::move(m));
    }

    double inv_mass_at(const RigidBody& body, const Vec3& r, const Vec3& dir) const {
        if (!body.dynamic) return 0.0;
        const Vec3 rxd = cross(r, dir);
        return body.inv_mass + dot(rxd, body.inv_inertia_world * rxd);
    }

    void prepare_contacts(double h) {
        for (Manifold& m : manifolds_) {
            const RigidBody* a = m.a >= 0 ? &bodies_[size_t(m.a)] : nullptr;
            RigidBody& b = bodies_[size_t(m.b)];
            for (ContactPoint& p : m.points) {
                p.ra = a ? p.point - a->com_world : Vec3{};
                p.rb = p.point - b.com_world;
                const double ka = a ? inv_mass_at(*a, p.ra, m.normal) : 0.0;
                p.mass_n = 1.0 / (ka + inv_mass_at(b, p.rb, m.normal));
                const double ka1 = a ? inv_mass_at(*a, p.ra, m.t1) : 0.0;
                p.mass_t1 = 1.0 / (ka1 + inv_mass_at(b, p.rb, m.t1));
                const double ka2 = a ? inv_mass_at(*a, p.ra, m.t2) : 0.0;
                p.mass_t2 = 1.0 / (ka2 + inv_mass_at(b, p.rb, m.t2));

                if (p.separation >= 0.0) {
                    // speculative: allow closing exactly onto the surface
                    p.bias = -p.separation / h;
                } else {
                    p.bias = std::min(kBaumgarte * (-p.separation) / h,
                                      config_.max_depenetration_vel);
                }
                if (config_.restitution > 0.0) {
                    const double vn = normal_velocity(m, p);
                    if (vn < -1.0) p.bias = std::max(p.bias, -config_.restitution * vn);
                }
            }

            // centroid data for the block pre-solve
            Vec3 c{0, 0, 0};
            double bias_sum = 0.0;
            for (const ContactPoint& p : m.points) {
                c += p.point;
                bias_sum += p.bias;
            }
            m.center = c / double(m.points.size());
            m.bias_c = bias_sum / double(m.points.size());
            m.cra = a ? m.center - a->com_world : Vec3{};
            m.crb = m.center - b.com_world;
            const double kca = a ? inv_mass_at(*a, m.cra, m.normal) : 0.0;
            m.mass_c = 1.0 / (kca + inv_mass_at(b, m.crb, m.normal));
        }
    }

    double normal_velocity(const Manifold& m, const ContactPoint& p) const {
        const RigidBody& b = bodies_[size_t(m.b)];
        Vec3 rel = b.v + cross(b.w, p.rb);
        if (m.a >= 0) {
            const RigidBody& a = bodies_[size_t(m.a)];
            rel -= a.v + cross(a.w, p.ra);
        }
        return dot(rel, m.normal);
    }

    void apply_impulse(Manifold& m, ContactPoint& p, const Vec3& impulse) {
        RigidBody& b = bodies_[size_t(m.b)];
        if (b.dynamic) {
            b.v += b.inv_mass * impulse;
            b.w += b.inv_inertia_world * cross(p.rb, impulse);
        }
        if (m.a >= 0) {
            RigidBody& a = bodies_[size_t(m.a)];
            if (a.dynamic) {
                a.v -= a.inv_mass * impulse;
                a.w -= a.inv_inertia_world * cross(p.ra, impulse);
            }
        }
    }

    void warm_start() {
        for (Manifold& m : manifolds_) {
            auto it = impulse_cache_.find({m.a, m.b});
            if (it == impulse_cache_.end()) continue;
            for (ContactPoint& p : m.points) {
                for (const CachedImpulse& c : it->second) {
                    if (norm2(c.point - p.point) > 1e-6) continue;
                    p.jn = c.jn;
                    p.jt1 = c.jt1;
                    p.jt2 = c.jt2;
                    apply_impulse(m, p, p.jn * m.normal + p.jt1 * m.t1 + p.jt2 * m.t2);
                    break;
                }
            }
        }
    }

    void solve_iteration() {
        for (Manifold& m : manifolds_) {
            RigidBody& b = bodies_[size_t(m.b)];
            RigidBody* a = m.a >= 0 ? &bodies_[size_t(m.a)] : nullptr;

            // Block pre-solve at the manifold centroid: carries the bulk of
            // the normal load in one torque-symmetric impulse so that stacks
            // converge within the configured per-point iterations.
            if (m.points.size() > 1) {
                Vec3 relc = b.v + cross(b.w, m.crb);
                if (a) relc -= a->v + cross(a->w, m.cra);
                const double vnc = dot(relc, m.normal);
                const double want = -(vnc - m.bias_c) * m.mass_c;
                const double share = want / double(m.points.size());
                double applied = 0.0;
                for (ContactPoint& p : m.points) {
                    const double old = p.jn;
                    p.jn = std::max(0.0, old + share);
                    applied += p.jn - old;
                }
                if (applied != 0.0) {
                    const Vec3 impulse = applied * m.normal;
                    if (b.dynamic) {
                        b.v += b.inv_mass * impulse;
                        b.w += b.inv_inertia_world * cross(m.crb, impulse);
                    }
                    if (a && a->dynamic) {
                        a->v -= a->inv_mass * impulse;
                        a->w -= a->inv_inertia_world * cross(m.cra, impulse);
                    }
                }
            }

            for (ContactPoint& p : m.points) {
                Vec3 rel = b.v + cross(b.w, p.rb);
                if (a) rel -= a->v + cross(a->w, p.ra);
                const double vn = dot(rel, m.normal);
                double dj = -(vn - p.bias) * p.mass_n;
                const double jn_old = p.jn;
                p.jn = std::max(0.0, jn_old + dj);
                dj = p.jn - jn_old;
                if (dj != 0.0) apply_impulse(m, p, dj * m.normal);

                const double max_f = config_.friction * p.jn;
                rel = b.v + cross(b.w, p.rb);
                if (a) rel -= a->v + cross(a->w, p.ra);
                double dt1 = -dot(rel, m.t1) * p.mass_t1;
                const double jt1_old = p.jt1;
                p.jt1 = std::clamp(jt1_old + dt1, -max_f, max_f);
                dt1 = p.jt1 - jt1_old;
                if (dt1 != 0.0) apply_impulse(m, p, dt1 * m.t1);

                rel = b.v + cross(b.w, p.rb);
                if (a) rel -= a->v + cross(a->w, p.ra);
                double dt2 = -dot(rel, m.t2) * p.mass_t2;
                const double jt2_old = p.jt2;
                p.jt2 = std::clamp(jt2_old + dt2, -max_f, max_f);
                dt2 = p.jt2 - jt2_old;
                if (dt2 != 0.0) apply_impulse(m, p, dt2 * m.t2);
            }
        }
    }

    void integrate(double h, int step) {
        for (RigidBody& b : bodies_) {
            if (!b.dynamic) continue;
            b.com_world += h * b.v;
            const UnitQuat wq{0.0, b.w.x, b.w.y, b.w.z};
            const UnitQuat dq = wq * b.pose.rotation;
            UnitQuat q{b.pose.rotation.w + 0.5 * h * dq.w, b.pose.rotation.x + 0.5 * h * dq.x,
                       b.pose.rotation.y + 0.5 * h * dq.y, b.pose.rotation.z + 0.5 * h * dq.z};
            const double n = q.norm();
            b.pose.rotation = UnitQuat{q.w / n, q.x / n, q.y / n, q.z / n};
            b.pose.translation = b.com_world - b.pose.rotation.rotate(b.com_body);
            if (!b.pose.translation.finite() || !b.v.finite() || !b.w.finite() ||
                !std::isfinite(b.pose.rotation.w))
                throw SimulationDiverged(step, b.id);
            b.refresh_derived();
        }
    }

    void cache_impulses() {
        impulse_cache_.clear();
        for (const Manifold& m : manifolds_) {
            auto& list = impulse_cache_[{m.a, m.b}];
            for (const ContactPoint& p : m.points) list.push_back({p.point, p.jn, p.jt1, p.jt2});
        }
    }

    struct CachedImpulse {
        Vec3 point;
        double jn, jt1, jt2;
    };

    SimConfig config_;
    std::vector<RigidBody> bodies_;
    std::vector<Manifold> manifolds_;
    std::map<std::pair<int, int>, std::vector<CachedImpulse>> impulse_cache_;
};

} // namespace

SimTrace settle(const Scene& scene, const Layout& layout, const std::set<std::string>& fixed_ids,
                const SimConfig& config, const std::vector<std::string>& include_ids,
                const StepObserver& observer) {
    Simulator sim(scene, layout, fixed_ids, config, include_ids);
    return sim.run(observer);
}

std::map<std::string, bool> is_stable(const SimTrace& trace, double pos_thresh,
                                      double rot_thresh) {
    std::map<std::string, bool> out;
    for (const auto& [id, init] : trace.initial) {
        const BodyState& fin = trace.final_state.at(id);
        if (!init.dynamic) {
            out[id] = true;
            continue;
        }
        const double drift = norm(fin.pose.translation - init.pose.translation);
        const double rot = geodesic_distance(fin.pose.rotation, init.pose.rotation);
        out[id] = drift <= pos_thresh && rot <= rot_thresh;
    }
    return out;
}

} // namespace stablescene
