#include "stablescene/templates.hpp"

#include <cmath>
#include <stdexcept>

#include "stablescene/rng.hpp"
#include "stablescene/scene_io.hpp"
#include "stablescene/vec3.hpp"

namespace stablescene {

namespace {

// spec-writer helper: accumulates objects/tree/layout and emits the JSON
class SpecBuilder {
public:
    void add_box(const std::string& id, Vec3 size, double mass, const std::string& parent,
                 const std::string& relation, Vec3 pos, double yaw = 0.0, bool movable = true) {
        Entry e;
        e.id = id;
        e.size = size;
        e.mass = mass;
        e.parent = parent;
        e.relation = relation;
        e.pos = pos;
        e.yaw = yaw;
        e.movable = movable;
        entries_.push_back(std::move(e));
    }

    // multi-hull object given as explicit hull vertex lists
    void add_hulls(const std::string& id, std::vector<std::vector<Vec3>> hulls, double mass,
                   const std::string& parent, const std::string& relation, Vec3 pos,
                   double yaw = 0.0, bool movable = true) {
        Entry e;
        e.id = id;
        e.hulls = std::move(hulls);
        e.mass = mass;
        e.parent = parent;
        e.relation = relation;
        e.pos = pos;
        e.yaw = yaw;
        e.movable = movable;
        entries_.push_back(std::move(e));
    }

    std::string json() const {
        JsonWriter w;
        w.begin_object();
        w.key("objects").begin_array();
        for (const Entry& e : entries_) {
            w.begin_object();
            w.key("id").value(e.id);
            w.key("name").value(e.id);
            if (e.hulls.empty()) {
                w.key("box").value(e.size);
            } else {
                w.key("hulls").begin_array();
                for (const auto& hull : e.hulls) {
                    w.begin_array();
                    for (const Vec3& v : hull) w.value(v);
                    w.end_array();
                }
                w.end_array();
            }
            w.key("mass").value(e.mass);
            w.key("movable").value(e.movable);
            w.end_object();
        }
        w.end_array();
        w.key("tree").begin_object();
        for (const Entry& e : entries_) {
            w.key(e.id).begin_object();
            w.key("parent").value(e.parent);
            w.key("relation").value(e.relation);
            w.end_object();
        }
        w.end_object();
        w.key("layout").begin_object();
        for (const Entry& e : entries_) {
            w.key(e.id).begin_object();
            const double h = 0.5 * e.yaw;
            w.key("quat").begin_array();
            w.value(std::cos(h));
            w.value(0.0);
            w.value(std::sin(h));
            w.value(0.0);
            w.end_array();
            w.key("pos").value(e.pos);
            w.end_object();
        }
        w.end_object();
        w.end_object();
        return w.str() + "\n";
    }

private:
    struct Entry {
        std::string id;
        Vec3 size;
        std::vector<std::vector<Vec3>> hulls;
        double mass = 1.0;
        std::string parent, relation;
        Vec3 pos;
        double yaw = 0.0;
        bool movable = true;
    };
    std::vector<Entry> entries_;
};

std::vector<Vec3> box_hull(Vec3 size, Vec3 center = {0, 0, 0}) {
    std::vector<Vec3> pts;
    for (int ix : {-1, 1})
        for (int iy : {-1, 1})
            for (int iz : {-1, 1})
                pts.push_back(center + Vec3{0.5 * ix * size.x, 0.5 * iy * size.y,
                                            0.5 * iz * size.z});
    return pts;
}

// slab top + four legs, hull origin at the bottom of the legs
std::vector<std::vector<Vec3>> table_hulls(double width, double height, double depth,
                                           double top_thickness, double leg_side) {
    std::vector<std::vector<Vec3>> hulls;
    hulls.push_back(box_hull({width, top_thickness, depth},
                             {0, height - 0.5 * top_thickness, 0}));
    const double leg_h = height - top_thickness;
    const double lx = 0.5 * width - 0.5 * leg_side;
    const double lz = 0.5 * depth - 0.5 * leg_side;
    for (int ix : {-1, 1})
        for (int iz : {-1, 1})
            hulls.push_back(box_hull({leg_side, leg_h, leg_side},
                                     {ix * lx, 0.5 * leg_h, iz * lz}));
    return hulls;
}

std::string gen_stack(const TemplateParams& p) {
    Rng rng(p.seed);
    SpecBuilder b;
    const int n = std::max(1, p.n);
    double size = 0.5;
    double top = 0.0;
    std::string parent = "ground";
    for (int i = 0; i < n; ++i) {
        const std::string id = "box" + std::to_string(i);
        const double height = size;
        // float/sink injection up to +-4 cm plus slight lateral jitter
        const double y_err = rng.uniform(-0.04, 0.04);
        const Vec3 pos{rng.uniform(-0.02, 0.02), top + 0.5 * height + y_err,
                       rng.uniform(-0.02, 0.02)};
        b.add_box(id, {size, height, size}, 4.0 * size, parent, "on", pos,
                  rng.uniform(-0.1, 0.1));
        parent = id;
        top += height;
        size *= 0.72;
    }
    return b.json();
}

std::string gen_table_plant(const TemplateParams& p) {
    Rng rng(p.seed);
    SpecBuilder b;
    const double table_h = 0.72;
    const double float_err = rng.uniform(0.02, 0.06);
    const double sink_err = rng.uniform(0.02, 0.05);
    b.add_hulls("table", table_hulls(1.1, table_h, 0.65, 0.05, 0.06), 22.0, "ground", "on",
                {0, float_err, 0});
    // pot + foliage, origin at the pot bottom
    std::vector<std::vector<Vec3>> plant;
    plant.push_back(box_hull({0.16, 0.18, 0.16}, {0, 0.09, 0}));
    plant.push_back(box_hull({0.28, 0.3, 0.28}, {0, 0.33, 0}));
    b.add_hulls("plant", plant, 1.8, "table", "on",
                {rng.uniform(-0.25, 0.25), float_err + table_h - sink_err,
                 rng.uniform(-0.12, 0.12)});
    return b.json();
}

std::string gen_unstable_office(const TemplateParams& p) {
    Rng rng(p.seed);
    SpecBuilder b;
    const double desk_h = 0.72;
    const double desk_float = 0.03 + rng.uniform(0.0, 0.02);
    b.add_hulls("desk", table_hulls(1.2, desk_h, 0.6, 0.05, 0.06), 28.0, "ground", "on",
                {0, desk_float, 0});
    const double top_y = desk_float + desk_h;
    // desk children: monitor sunk, lamp floating, a two-book stack
    b.add_box("monitor", {0.45, 0.3, 0.08}, 3.0, "desk", "on",
              {-0.3, top_y + 0.15 - 0.02 - rng.uniform(0.0, 0.01), -0.1});
    b.add_box("lamp", {0.12, 0.35, 0.12}, 1.2, "desk", "on",
              {0.45, top_y + 0.175 + 0.01 + rng.uniform(0.0, 0.01), -0.15});
    b.add_box("book1", {0.22, 0.04, 0.16}, 0.6, "desk", "on",
              {0.1, top_y + 0.02 + rng.uniform(-0.01, 0.01), 0.12});
    b.add_box("book2", {0.2, 0.035, 0.14}, 0.5, "book1", "on",
              {0.11, top_y + 0.04 + 0.0175 - 0.005, 0.125});
    // chairs interpenetrate laterally
    b.add_box("chair1", {0.42, 0.45, 0.42}, 6.0, "ground", "on", {-0.95, 0.225, 0.0});
    b.add_box("chair2", {0.42, 0.45, 0.42}, 6.0, "ground", "on",
              {-0.95 + 0.42 - 0.03, 0.225, 0.03});
    // immovable wardrobe off to the side
    b.add_box("wardrobe", {0.55, 1.4, 0.4}, 90.0, "ground", "on", {1.9, 0.7, 0.0}, 0.0,
              false);
    // slotted organizer with the bin sunk sideways into its thick wall; the
    // short second wall blocks the push-out direction, so only a combined
    // x/z displacement frees the bin
    std::vector<std::vector<Vec3>> organizer;
    organizer.push_back(box_hull({0.06, 0.42, 0.30}, {-0.19, 0.21, 0.0}));   // thick wall
    organizer.push_back(box_hull({0.06, 0.42, 0.11}, {0.075, 0.21, -0.095})); // short wall
    organizer.push_back(box_hull({0.333, 0.42, 0.06}, {-0.0535, 0.21, -0.18})); // back wall
    const Vec3 org_pos{1.05, 0.0, 0.75};
    b.add_hulls("organizer", organizer, 40.0, "ground", "on", org_pos);
    // bin body: 0.22 wide; its left face reaches 0.025 m into the thick wall
    b.add_box("bin", {0.22, 0.3, 0.22}, 1.0, "ground", "on",
              org_pos + Vec3{-0.16 - 0.025 + 0.11, 0.15, 0.0});
    b.add_box("sidetable", {0.4, 0.5, 0.4}, 9.0, "ground", "on",
              {-0.2, 0.25 + rng.uniform(0.0, 0.05), -0.9});
    return b.json();
}

std::string gen_wall_poster(const TemplateParams& p) {
    Rng rng(p.seed);
    SpecBuilder b;
    b.add_box("bookshelf", {0.8, 1.2, 0.3}, 35.0, "ground", "on", {0, 0.6, 0});
    b.add_box("cabinet", {0.6, 0.8, 0.35}, 25.0, "ground", "on", {-1.1, 0.4, -0.05});
    // poster overlaps the shelf's back face; pushed out along +Z
    b.add_box("poster", {0.5, 0.7, 0.04}, 0.8, "wall", "attached",
              {0.1, 0.8, 0.15 - 0.02 + rng.uniform(-0.005, 0.005)});
    // lamp hangs clear of everything
    b.add_box("ceiling_lamp", {0.25, 0.3, 0.25}, 1.5, "ceiling", "hanging", {0.2, 2.2, 0.0});
    return b.json();
}

std::string gen_random_forest(const TemplateParams& p) {
    Rng rng(p.seed);
    SpecBuilder b;
    struct Placed {
        std::string id;
        Vec3 size;
        Vec3 pos;
    };
    std::vector<Placed> placed;
    const int n = std::max(1, p.objects);
    for (int i = 0; i < n; ++i) {
        const std::string id = "obj" + std::to_string(i);
        const Vec3 size{rng.uniform(0.15, 0.6), rng.uniform(0.15, 0.6),
                        rng.uniform(0.15, 0.6)};
        const double mass = 2.0 + 20.0 * size.x * size.y * size.z;
        if (placed.empty() || rng.uniform() < 0.6) {
            const Vec3 pos{rng.uniform(-2.0, 2.0), 0.5 * size.y + rng.uniform(-0.05, 0.2),
                           rng.uniform(-2.0, 2.0)};
            b.add_box(id, size, mass, "ground", "on", pos, rng.uniform(-0.3, 0.3));
            placed.push_back({id, size, pos});
        } else {
            const Placed& host = placed[rng.uniform_index(placed.size())];
            const Vec3 pos{host.pos.x + rng.uniform(-0.1, 0.1) * host.size.x,
                           host.pos.y + 0.5 * host.size.y + 0.5 * size.y +
                               rng.uniform(-0.05, 0.1),
                           host.pos.z + rng.uniform(-0.1, 0.1) * host.size.z};
            b.add_box(id, size, mass, host.id, "on", pos, rng.uniform(-0.3, 0.3));
            placed.push_back({id, size, pos});
        }
    }
    return b.json();
}

} // namespace

std::vector<std::string> template_names() {
    return {"stack", "table_plant", "unstable_office", "wall_poster", "random_forest"};
}

std::string gen_scene_json(const std::string& template_name, const TemplateParams& params) {
    if (template_name == "stack") return gen_stack(params);
    if (template_name == "table_plant") return gen_table_plant(params);
    if (template_name == "unstable_office") return gen_unstable_office(params);
    if (template_name == "wall_poster") return gen_wall_poster(params);
    if (template_name == "random_forest") return gen_random_forest(params);
    throw std::invalid_argument("unknown scene template '" + template_name + "'");
}

void gen_scene_file(const std::string& template_name, const TemplateParams& params,
                    const std::string& out_path) {
    write_text_file(out_path, gen_scene_json(template_name, params));
}

} // namespace stablescene
