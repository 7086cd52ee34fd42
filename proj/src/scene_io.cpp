#include "stablescene/scene_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stablescene/errors.hpp"

namespace stablescene {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ------------------------------------------------------------ JsonWriter

void JsonWriter::comma() {
    if (!needs_comma_.empty() && needs_comma_.back() && !pending_key_) out_ += ",";
    if (!needs_comma_.empty() && !pending_key_) needs_comma_.back() = true;
    pending_key_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_ += "{";
    needs_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += "}";
    needs_comma_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    comma();
    out_ += "[";
    needs_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += "]";
    needs_comma_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    comma();
    out_ += json(k).dump();
    out_ += ":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    comma();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value(long long v) {
    comma();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    comma();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
    comma();
    out_ += json(s).dump();
    return *this;
}

JsonWriter& JsonWriter::value(const Vec3& v) {
    begin_array();
    value(v.x);
    value(v.y);
    value(v.z);
    return end_array();
}

JsonWriter& JsonWriter::value(const UnitQuat& q) {
    begin_array();
    value(q.w);
    value(q.x);
    value(q.y);
    value(q.z);
    return end_array();
}

// ------------------------------------------------------------------ OBJ

ObjMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(ValidationCode::MissingMesh, "", "cannot open mesh: " + path);
    ObjMesh mesh;
    std::string line;
    auto vertex_index = [&](const std::string& tok) -> int {
        // "v", "v/vt", "v//vn", "v/vt/vn"; negative = relative to end
        const size_t slash = tok.find('/');
        int idx = std::stoi(slash == std::string::npos ? tok : tok.substr(0, slash));
        if (idx < 0) idx = int(mesh.vertices.size()) + idx + 1;
        if (idx < 1 || idx > int(mesh.vertices.size()))
            throw ValidationError(ValidationCode::ParseError, "",
                                  "obj face index out of range in " + path);
        return idx - 1;
    };
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z))
                throw ValidationError(ValidationCode::ParseError, "",
                                      "malformed obj vertex in " + path);
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ls >> tok) poly.push_back(vertex_index(tok));
            if (poly.size() < 3)
                throw ValidationError(ValidationCode::ParseError, "",
                                      "obj face with < 3 vertices in " + path);
            for (size_t i = 1; i + 1 < poly.size(); ++i)
                mesh.triangles.push_back({poly[0], poly[i], poly[i + 1]});
        }
        // all other directives ignored
    }
    if (mesh.vertices.empty())
        throw ValidationError(ValidationCode::ParseError, "", "obj has no vertices: " + path);
    return mesh;
}

// ------------------------------------------------------------ scene load

namespace {

Relation parse_relation(const std::string& s, const std::string& id) {
    if (s == "on") return Relation::On;
    if (s == "inside") return Relation::Inside;
    if (s == "hanging") return Relation::Hanging;
    if (s == "attached") return Relation::Attached;
    throw ValidationError(ValidationCode::ParseError, id, "unknown relation '" + s + "'");
}

SupportNode parse_parent(const json& entry, const std::string& id) {
    SupportNode node;
    const std::string parent = entry.at("parent").get<std::string>();
    if (parent == "ground") node.kind = ParentKind::Ground;
    else if (parent == "wall") node.kind = ParentKind::Wall;
    else if (parent == "ceiling") node.kind = ParentKind::Ceiling;
    else if (parent == "ground_wall") node.kind = ParentKind::GroundWall;
    else {
        node.kind = ParentKind::Object;
        node.parent_id = parent;
    }
    if (entry.contains("relation"))
        node.relation = parse_relation(entry.at("relation").get<std::string>(), id);
    return node;
}

Pose parse_pose(const json& entry, const std::string& id) {
    Pose pose;
    const auto& q = entry.at("quat");
    const auto& p = entry.at("pos");
    if (!q.is_array() || q.size() != 4 || !p.is_array() || p.size() != 3)
        throw ValidationError(ValidationCode::ParseError, id, "pose needs quat[4] and pos[3]");
    pose.rotation = UnitQuat{q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                             q[3].get<double>()};
    if (!pose.rotation.is_unit())
        throw ValidationError(ValidationCode::BadField, id, "layout quaternion is not unit norm");
    pose.rotation = pose.rotation.normalize();
    pose.translation = Vec3{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    return pose;
}

std::vector<Vec3> box_corners(double sx, double sy, double sz) {
    const double hx = 0.5 * sx, hy = 0.5 * sy, hz = 0.5 * sz;
    std::vector<Vec3> pts;
    for (int ix : {-1, 1})
        for (int iy : {-1, 1})
            for (int iz : {-1, 1}) pts.push_back({ix * hx, iy * hy, iz * hz});
    return pts;
}

} // namespace

Scene load_scene(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ValidationError(ValidationCode::ParseError, "", e.what());
    }

    Scene scene;
    try {
        const fs::path base = fs::path(path).parent_path();
        if (!doc.contains("objects") || !doc["objects"].is_array())
            throw ValidationError(ValidationCode::ParseError, "", "missing objects[] array");

        for (const json& jo : doc["objects"]) {
            SceneObject obj;
            obj.id = jo.at("id").get<std::string>();
            obj.name = jo.value("name", obj.id);
            obj.scale = jo.value("scale", 1.0);
            obj.mass = jo.value("mass", 1.0);
            obj.movable = jo.value("movable", true);
            if (!(obj.scale > 0.0))
                throw ValidationError(ValidationCode::BadField, obj.id, "scale must be > 0");

            // Scale applies to geometry at load time; downstream code sees
            // metric-space vertices only.
            auto scaled = [&](std::vector<Vec3> pts) {
                for (Vec3& p : pts) p = obj.scale * p;
                return pts;
            };
            if (jo.contains("hulls")) {
                for (const json& jh : jo["hulls"]) {
                    std::vector<Vec3> pts;
                    for (const json& jp : jh)
                        pts.push_back({jp.at(0).get<double>(), jp.at(1).get<double>(),
                                       jp.at(2).get<double>()});
                    obj.hulls.push_back(convex_hull(scaled(pts)));
                }
            } else if (jo.contains("box")) {
                const auto& b = jo["box"];
                obj.hulls.push_back(convex_hull(
                    scaled(box_corners(b.at(0).get<double>(), b.at(1).get<double>(),
                                       b.at(2).get<double>()))));
            } else if (jo.contains("mesh")) {
                fs::path mesh_path = jo["mesh"].get<std::string>();
                if (mesh_path.is_relative()) mesh_path = base / mesh_path;
                const ObjMesh mesh = load_obj(mesh_path.string());
                obj.hulls.push_back(convex_hull(scaled(mesh.vertices)));
            } else {
                throw ValidationError(ValidationCode::BadField, obj.id,
                                      "object needs one of mesh, box, hulls");
            }
            scene.objects.push_back(std::move(obj));
        }
        std::sort(scene.objects.begin(), scene.objects.end(),
                  [](const SceneObject& a, const SceneObject& b) { return a.id < b.id; });

        if (!doc.contains("tree"))
            throw ValidationError(ValidationCode::ParseError, "", "missing tree{}");
        const json& jt = doc["tree"];
        if (jt.is_object()) {
            for (auto it = jt.begin(); it != jt.end(); ++it)
                scene.tree.parent[it.key()] = parse_parent(it.value(), it.key());
        } else if (jt.is_array()) {
            // array form can express duplicate entries; reject them
            for (const json& je : jt) {
                const std::string id = je.at("id").get<std::string>();
                if (scene.tree.parent.count(id))
                    throw ValidationError(ValidationCode::MultipleParents, id,
                                          "object listed with more than one parent");
                scene.tree.parent[id] = parse_parent(je, id);
            }
        } else {
            throw ValidationError(ValidationCode::ParseError, "", "tree must be object or array");
        }

        if (!doc.contains("layout"))
            throw ValidationError(ValidationCode::ParseError, "", "missing layout{}");
        for (auto it = doc["layout"].begin(); it != doc["layout"].end(); ++it)
            scene.raw_layout.poses[it.key()] = parse_pose(it.value(), it.key());
        scene.raw_layout.stage = LayoutStage::Raw;
    } catch (const ValidationError&) {
        throw;
    } catch (const DegenerateGeometry& e) {
        throw ValidationError(ValidationCode::BadField, "", e.what());
    } catch (const json::exception& e) {
        throw ValidationError(ValidationCode::ParseError, "", e.what());
    }

    validate_scene(scene);
    return scene;
}

void save_layout(const Layout& layout, const std::string& path) {
    JsonWriter w;
    w.begin_object();
    w.key("stage").value(layout_stage_name(layout.stage));
    w.key("layout").begin_object();
    for (const auto& [id, pose] : layout.poses) {
        w.key(id).begin_object();
        w.key("quat").value(pose.rotation.normalize().canonical());
        w.key("pos").value(pose.translation);
        w.end_object();
    }
    w.end_object();
    w.end_object();
    write_text_file(path, w.str() + "\n");
}

Layout load_layout(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ValidationError(ValidationCode::ParseError, "", e.what());
    }
    Layout layout;
    const std::string stage = doc.value("stage", "raw");
    if (stage == "raw") layout.stage = LayoutStage::Raw;
    else if (stage == "canonical") layout.stage = LayoutStage::Canonical;
    else if (stage == "optimized") layout.stage = LayoutStage::Optimized;
    else throw ValidationError(ValidationCode::ParseError, "", "unknown stage '" + stage + "'");
    try {
        for (auto it = doc.at("layout").begin(); it != doc.at("layout").end(); ++it)
            layout.poses[it.key()] = parse_pose(it.value(), it.key());
    } catch (const json::exception& e) {
        throw ValidationError(ValidationCode::ParseError, "", e.what());
    }
    return layout;
}

} // namespace stablescene
