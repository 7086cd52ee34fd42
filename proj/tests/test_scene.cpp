#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "stablescene/errors.hpp"
#include "stablescene/scene.hpp"
#include "stablescene/scene_io.hpp"
#include "test_util.hpp"

using namespace stablescene;
using namespace testutil;

namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("stablescene_test_" + name)).string();
}

std::string minimal_spec(const std::string& tree_json) {
    return R"({
  "objects": [
    {"id": "box", "box": [0.4, 0.4, 0.4], "mass": 1.0},
    {"id": "table", "box": [1.0, 0.7, 0.6], "mass": 20.0}
  ],
  "tree": )" + tree_json + R"(,
  "layout": {
    "box": {"quat": [1, 0, 0, 0], "pos": [0, 0.9, 0]},
    "table": {"quat": [1, 0, 0, 0], "pos": [0, 0.35, 0]}
  }
})";
}

Scene write_and_load(const std::string& name, const std::string& body) {
    const std::string path = temp_path(name);
    write_text_file(path, body);
    return load_scene(path);
}

} // namespace

TEST_CASE("load minimal scene") {
    const Scene s = write_and_load("minimal.json", minimal_spec(
        R"({"box": {"parent": "table", "relation": "on"}, "table": {"parent": "ground", "relation": "on"}})"));
    CHECK(s.objects.size() == 2);
    CHECK(s.tree.at("table").kind == ParentKind::Ground);
    CHECK(s.tree.at("box").kind == ParentKind::Object);
    CHECK(s.tree.at("box").parent_id == "table");
    CHECK(s.object("table").hulls.size() == 1);
    CHECK(s.object("table").hulls[0].volume == doctest::Approx(1.0 * 0.7 * 0.6));

    const auto groups = local_groups(s.tree);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].root_id == "table");
    CHECK(groups[0].child_ids == std::vector<std::string>{"box"});
}

TEST_CASE("scale applies to hull vertices at load") {
    const std::string body = R"({
  "objects": [{"id": "b", "box": [1, 1, 1], "scale": 2.0}],
  "tree": {"b": {"parent": "ground"}},
  "layout": {"b": {"quat": [1, 0, 0, 0], "pos": [0, 0, 0]}}
})";
    const Scene s = write_and_load("scaled.json", body);
    CHECK(s.object("b").hulls[0].volume == doctest::Approx(8.0));
}

TEST_CASE("validation rejects cycles") {
    try {
        write_and_load("cyclic.json", minimal_spec(
            R"({"box": {"parent": "table"}, "table": {"parent": "box"}})"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.code() == ValidationCode::Cycle);
    }
}

TEST_CASE("validation rejects dangling parent") {
    try {
        write_and_load("dangling.json", minimal_spec(
            R"({"box": {"parent": "ghost"}, "table": {"parent": "ground"}})"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.code() == ValidationCode::DanglingParent);
    }
}

TEST_CASE("validation rejects duplicate parent entries") {
    try {
        write_and_load("multi.json", minimal_spec(
            R"([{"id": "box", "parent": "table"}, {"id": "box", "parent": "ground"},)"
            R"( {"id": "table", "parent": "ground"}])"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.code() == ValidationCode::MultipleParents);
    }
}

TEST_CASE("validation rejects hanging under ground") {
    try {
        write_and_load("hangground.json", minimal_spec(
            R"({"box": {"parent": "ground", "relation": "hanging"}, "table": {"parent": "ground"}})"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.code() == ValidationCode::BadRelation);
    }
}

TEST_CASE("hanging allowed under wall-rooted object chain") {
    const std::string body = R"({
  "objects": [
    {"id": "shelf", "box": [0.6, 0.05, 0.2]},
    {"id": "hook", "box": [0.02, 0.06, 0.02]}
  ],
  "tree": {
    "shelf": {"parent": "wall", "relation": "attached"},
    "hook": {"parent": "shelf", "relation": "hanging"}
  },
  "layout": {
    "shelf": {"quat": [1, 0, 0, 0], "pos": [0, 1.5, 0]},
    "hook": {"quat": [1, 0, 0, 0], "pos": [0, 1.42, 0]}
  }
})";
    CHECK_NOTHROW(write_and_load("wallhang.json", body));
}

TEST_CASE("malformed json is a parse error") {
    const std::string path = temp_path("broken.json");
    write_text_file(path, "{not json");
    try {
        load_scene(path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.code() == ValidationCode::ParseError);
    }
}

TEST_CASE("missing mesh file") {
    const std::string body = R"({
  "objects": [{"id": "m", "mesh": "does_not_exist.obj"}],
  "tree": {"m": {"parent": "ground"}},
  "layout": {"m": {"quat": [1, 0, 0, 0], "pos": [0, 0, 0]}}
})";
    try {
        write_and_load("missingmesh.json", body);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.code() == ValidationCode::MissingMesh);
    }
}

TEST_CASE("obj mesh loads and hulls") {
    const std::string obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
                            "vn 0 0 1\nf 1//1 2//1 3//1\nf 1 2 4\nf 1 3 4\nf 2 3 4\n";
    const std::string obj_path = temp_path("tet.obj");
    write_text_file(obj_path, obj);
    const ObjMesh mesh = load_obj(obj_path);
    CHECK(mesh.vertices.size() == 4);
    CHECK(mesh.triangles.size() == 4);

    const std::string body = std::string(R"({
  "objects": [{"id": "t", "mesh": ")") + obj_path + R"("}],
  "tree": {"t": {"parent": "ground"}},
  "layout": {"t": {"quat": [1, 0, 0, 0], "pos": [0, 0, 0]}}
})";
    const Scene s = write_and_load("objscene.json", body);
    CHECK(s.object("t").hulls[0].volume == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("local_groups ordering") {
    SceneTree tree;
    // flat scene: no groups
    tree.parent["a"] = {ParentKind::Ground, "", Relation::On};
    tree.parent["b"] = {ParentKind::Ground, "", Relation::On};
    CHECK(local_groups(tree).empty());

    // chain ground -> table -> tray -> cup
    SceneTree chain;
    chain.parent["table"] = {ParentKind::Ground, "", Relation::On};
    chain.parent["tray"] = {ParentKind::Object, "table", Relation::On};
    chain.parent["cup"] = {ParentKind::Object, "tray", Relation::On};
    const auto groups = local_groups(chain);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].root_id == "tray");
    CHECK(groups[0].child_ids == std::vector<std::string>{"cup"});
    CHECK(groups[1].root_id == "table");
    CHECK(groups[1].child_ids == std::vector<std::string>{"tray"});
}

TEST_CASE("local_groups random forest post-order property") {
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        SceneTree tree;
        std::vector<std::string> ids;
        for (int i = 0; i < 20; ++i) {
            const std::string id = "n" + std::to_string(i);
            SupportNode node;
            if (ids.empty() || rng.uniform() < 0.3) {
                node.kind = ParentKind::Ground;
            } else {
                node.kind = ParentKind::Object;
                node.parent_id = ids[rng.uniform_index(ids.size())];
            }
            tree.parent[id] = node;
            ids.push_back(id);
        }
        const auto groups = local_groups(tree);

        // every parent group appears after all groups rooted in its subtree
        for (size_t gi = 0; gi < groups.size(); ++gi) {
            const auto desc = tree.descendants_of(groups[gi].root_id);
            const std::set<std::string> desc_set(desc.begin(), desc.end());
            for (size_t gj = gi + 1; gj < groups.size(); ++gj)
                CHECK(desc_set.count(groups[gj].root_id) == 0);
        }

        // partition property: group roots + childless = all nodes
        std::set<std::string> roots;
        for (const auto& g : groups) roots.insert(g.root_id);
        for (const std::string& id : ids) {
            const bool childless = tree.children_of(id).empty();
            CHECK(childless == (roots.count(id) == 0));
        }

        // each object is a child in at most one group
        std::set<std::string> seen_children;
        for (const auto& g : groups)
            for (const auto& c : g.child_ids) CHECK(seen_children.insert(c).second);
    }
}

TEST_CASE("global_roots") {
    SceneTree tree;
    tree.parent["table"] = {ParentKind::Ground, "", Relation::On};
    tree.parent["plant"] = {ParentKind::Object, "table", Relation::On};
    CHECK(global_roots(tree) == std::vector<std::string>{"table"});

    SceneTree t2;
    t2.parent["radiator"] = {ParentKind::GroundWall, "", Relation::On};
    t2.parent["poster"] = {ParentKind::Wall, "", Relation::Attached};
    CHECK(global_roots(t2) == std::vector<std::string>{"radiator"});

    // oracle filter over a random forest
    Rng rng(73);
    SceneTree t3;
    std::vector<std::string> ids;
    for (int i = 0; i < 20; ++i) {
        const std::string id = "o" + std::to_string(i);
        SupportNode node;
        const double r = rng.uniform();
        if (ids.empty() || r < 0.25) node.kind = ParentKind::Ground;
        else if (r < 0.35) node.kind = ParentKind::GroundWall;
        else if (r < 0.45) node.kind = ParentKind::Wall;
        else {
            node.kind = ParentKind::Object;
            node.parent_id = ids[rng.uniform_index(ids.size())];
        }
        t3.parent[id] = node;
        ids.push_back(id);
    }
    std::set<std::string> expect;
    for (const std::string& id : ids) {
        const auto& n = t3.at(id);
        if (n.kind == ParentKind::Ground || n.kind == ParentKind::GroundWall) expect.insert(id);
        if (!t3.children_of(id).empty() && !t3.wall_or_ceiling_rooted(id)) expect.insert(id);
    }
    const auto got = global_roots(t3);
    CHECK(std::set<std::string>(got.begin(), got.end()) == expect);
}

TEST_CASE("layout round trip is byte stable") {
    Rng rng(79);
    for (int trial = 0; trial < 1000; ++trial) {
        Layout layout;
        layout.stage = LayoutStage::Canonical;
        const int n = 1 + int(rng.uniform_index(5));
        for (int i = 0; i < n; ++i) {
            Pose p{random_quat(rng), random_vec(rng, -10, 10)};
            layout.poses["obj" + std::to_string(i)] = p;
        }
        const std::string p1 = temp_path("rt1.json");
        const std::string p2 = temp_path("rt2.json");
        save_layout(layout, p1);
        const Layout back = load_layout(p1);
        CHECK(back.stage == layout.stage);
        save_layout(back, p2);
        CHECK(read_text_file(p1) == read_text_file(p2));
    }
}

TEST_CASE("q and -q serialize identically") {
    Layout a, b;
    a.stage = b.stage = LayoutStage::Raw;
    const UnitQuat q = UnitQuat::from_axis_angle({0.3, 0.8, 0.1}, 1.1);
    a.poses["x"] = {q, {1, 2, 3}};
    b.poses["x"] = {UnitQuat{-q.w, -q.x, -q.y, -q.z}, {1, 2, 3}};
    const std::string pa = temp_path("hemi_a.json");
    const std::string pb = temp_path("hemi_b.json");
    save_layout(a, pa);
    save_layout(b, pb);
    CHECK(read_text_file(pa) == read_text_file(pb));
}
