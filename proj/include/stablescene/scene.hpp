#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stablescene/hull.hpp"
#include "stablescene/pose.hpp"

namespace stablescene {

enum class ParentKind { Ground, Wall, Ceiling, GroundWall, Object };

enum class Relation { On, Inside, Hanging, Attached };

const char* parent_kind_name(ParentKind k);
const char* relation_name(Relation r);

/// Support edge: a parent (canonical node or another object) and the
/// relation type of the edge.
struct SupportNode {
    ParentKind kind = ParentKind::Ground;
    std::string parent_id; // set iff kind == Object
    Relation relation = Relation::On;
};

struct SceneObject {
    std::string id;
    std::string name;
    std::vector<ConvexHull> hulls; // body frame, scale already applied
    double scale = 1.0;
    double mass = 1.0;
    bool movable = true;

    Aabb local_aabb() const;
    double hull_volume() const;
};

/// Support-relation forest rooted at the four canonical nodes.
struct SceneTree {
    std::map<std::string, SupportNode> parent;

    bool has(const std::string& id) const { return parent.count(id) > 0; }
    const SupportNode& at(const std::string& id) const { return parent.at(id); }

    /// Direct object children of an object id, lexicographic.
    std::vector<std::string> children_of(const std::string& id) const;

    /// Objects whose parent is the given canonical node, lexicographic.
    std::vector<std::string> children_of_canonical(ParentKind kind) const;

    /// All descendants of id (excluding id), pre-order, children lexicographic.
    std::vector<std::string> descendants_of(const std::string& id) const;

    /// Canonical node the chain of id terminates in.
    ParentKind root_kind(const std::string& id) const;

    /// True when the chain terminates at Wall or Ceiling.
    bool wall_or_ceiling_rooted(const std::string& id) const {
        const ParentKind k = root_kind(id);
        return k == ParentKind::Wall || k == ParentKind::Ceiling;
    }
};

enum class LayoutStage { Raw, Canonical, Optimized };

const char* layout_stage_name(LayoutStage s);

struct Layout {
    std::map<std::string, Pose> poses;
    LayoutStage stage = LayoutStage::Raw;

    const Pose& at(const std::string& id) const { return poses.at(id); }
    bool has(const std::string& id) const { return poses.count(id) > 0; }
};

/// A non-canonical node together with its direct tree children.
struct LocalGroup {
    std::string root_id;
    std::vector<std::string> child_ids; // lexicographic, non-empty
};

struct Scene {
    std::vector<SceneObject> objects; // sorted by id
    SceneTree tree;
    Layout raw_layout;

    const SceneObject& object(const std::string& id) const;
    const SceneObject* find(const std::string& id) const;
    std::vector<std::string> ids() const;
};

/// Enforces every scene invariant: unique ids, poses for every object,
/// a parent entry per object, acyclic chains ending in canonical nodes,
/// and relation constraints. Throws ValidationError with a specific code.
void validate_scene(const Scene& scene);

/// One group per non-canonical node with >= 1 child, post-order
/// (leaf groups before their ancestors' groups).
std::vector<LocalGroup> local_groups(const SceneTree& tree);

/// Objects adjusted in the global stage: ground/ground-wall children plus
/// every local-group root, deduplicated; wall/ceiling-parented excluded.
std::vector<std::string> global_roots(const SceneTree& tree);

} // namespace stablescene
