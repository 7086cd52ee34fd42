#include "stablescene/scene.hpp"

#include <algorithm>
#include <functional>

#include "stablescene/errors.hpp"

namespace stablescene {

const char* parent_kind_name(ParentKind k) {
    switch (k) {
        case ParentKind::Ground: return "ground";
        case ParentKind::Wall: return "wall";
        case ParentKind::Ceiling: return "ceiling";
        case ParentKind::GroundWall: return "ground_wall";
        case ParentKind::Object: return "object";
    }
    return "?";
}

const char* relation_name(Relation r) {
    switch (r) {
        case Relation::On: return "on";
        case Relation::Inside: return "inside";
        case Relation::Hanging: return "hanging";
        case Relation::Attached: return "attached";
    }
    return "?";
}

const char* layout_stage_name(LayoutStage s) {
    switch (s) {
        case LayoutStage::Raw: return "raw";
        case LayoutStage::Canonical: return "canonical";
        case LayoutStage::Optimized: return "optimized";
    }
    return "?";
}

Aabb SceneObject::local_aabb() const {
    Aabb box;
    for (const ConvexHull& h : hulls) box.extend(h.local_aabb());
    return box;
}

double SceneObject::hull_volume() const {
    double v = 0.0;
    for (const ConvexHull& h : hulls) v += h.volume;
    return v;
}

std::vector<std::string> SceneTree::children_of(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [child, node] : parent)
        if (node.kind == ParentKind::Object && node.parent_id == id) out.push_back(child);
    return out; // map iteration is already lexicographic
}

std::vector<std::string> SceneTree::children_of_canonical(ParentKind kind) const {
    std::vector<std::string> out;
    for (const auto& [child, node] : parent)
        if (node.kind == kind) out.push_back(child);
    return out;
}

std::vector<std::string> SceneTree::descendants_of(const std::string& id) const {
    std::vector<std::string> out;
    std::function<void(const std::string&)> walk = [&](const std::string& cur) {
        for (const std::string& c : children_of(cur)) {
            out.push_back(c);
            walk(c);
        }
    };
    walk(id);
    return out;
}

ParentKind SceneTree::root_kind(const std::string& id) const {
    std::string cur = id;
    for (size_t guard = 0; guard <= parent.size(); ++guard) {
        const SupportNode& n = at(cur);
        if (n.kind != ParentKind::Object) return n.kind;
        cur = n.parent_id;
    }
    throw ValidationError(ValidationCode::Cycle, id, "parent chain does not terminate");
}

const SceneObject& Scene::object(const std::string& id) const {
    const SceneObject* o = find(id);
    if (!o) throw std::out_of_range("no such object: " + id);
    return *o;
}

const SceneObject* Scene::find(const std::string& id) const {
    auto it = std::lower_bound(objects.begin(), objects.end(), id,
                               [](const SceneObject& o, const std::string& key) { return o.id < key; });
    if (it != objects.end() && it->id == id) return &*it;
    return nullptr;
}

std::vector<std::string> Scene::ids() const {
    std::vector<std::string> out;
    out.reserve(objects.size());
    for (const SceneObject& o : objects) out.push_back(o.id);
    return out;
}

void validate_scene(const Scene& scene) {
    std::set<std::string> ids;
    for (const SceneObject& o : scene.objects) {
        if (!ids.insert(o.id).second)
            throw ValidationError(ValidationCode::DuplicateId, o.id, "object id appears twice");
        if (o.hulls.empty())
            throw ValidationError(ValidationCode::BadField, o.id, "object has no collision hulls");
        if (!(o.scale > 0.0))
            throw ValidationError(ValidationCode::BadField, o.id, "scale must be > 0");
        if (!(o.mass > 0.0))
            throw ValidationError(ValidationCode::BadField, o.id, "mass must be > 0");
    }

    for (const std::string& id : ids) {
        if (!scene.tree.has(id))
            throw ValidationError(ValidationCode::MultipleParents, id,
                                  "object has no scene-tree parent entry");
        if (!scene.raw_layout.has(id))
            throw ValidationError(ValidationCode::MissingPose, id, "layout has no pose for object");
    }
    for (const auto& [id, node] : scene.tree.parent) {
        if (!ids.count(id))
            throw ValidationError(ValidationCode::DanglingParent, id,
                                  "tree entry references unknown object");
        if (node.kind == ParentKind::Object && !ids.count(node.parent_id))
            throw ValidationError(ValidationCode::DanglingParent, id,
                                  "parent id '" + node.parent_id + "' is not a scene object");
    }
    for (const auto& [id, pose] : scene.raw_layout.poses) {
        if (!pose.rotation.is_unit())
            throw ValidationError(ValidationCode::BadField, id, "non-unit quaternion in layout");
        if (!pose.translation.finite())
            throw ValidationError(ValidationCode::BadField, id, "non-finite translation in layout");
    }

    // Chains must terminate at a canonical node (detects cycles).
    for (const auto& [id, node] : scene.tree.parent) {
        std::set<std::string> seen{id};
        std::string cur = id;
        while (true) {
            const SupportNode& n = scene.tree.at(cur);
            if (n.kind != ParentKind::Object) break;
            cur = n.parent_id;
            if (!seen.insert(cur).second)
                throw ValidationError(ValidationCode::Cycle, id,
                                      "cycle in support chain through '" + cur + "'");
        }
    }

    // Hanging/Attached only under wall/ceiling chains.
    for (const auto& [id, node] : scene.tree.parent) {
        if (node.relation != Relation::Hanging && node.relation != Relation::Attached) continue;
        bool ok = false;
        if (node.kind == ParentKind::Wall || node.kind == ParentKind::Ceiling) ok = true;
        if (node.kind == ParentKind::Object && scene.tree.wall_or_ceiling_rooted(node.parent_id))
            ok = true;
        if (!ok)
            throw ValidationError(ValidationCode::BadRelation, id,
                                  std::string(relation_name(node.relation)) +
                                      " relation requires a wall- or ceiling-rooted parent");
    }
}

std::vector<LocalGroup> local_groups(const SceneTree& tree) {
    std::vector<LocalGroup> out;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        const std::vector<std::string> kids = tree.children_of(id);
        for (const std::string& c : kids) visit(c);
        if (!kids.empty()) out.push_back({id, kids});
    };
    // Forest roots in canonical-kind order, then lexicographic.
    for (ParentKind k :
         {ParentKind::Ground, ParentKind::GroundWall, ParentKind::Wall, ParentKind::Ceiling}) {
        for (const std::string& r : tree.children_of_canonical(k)) visit(r);
    }
    return out;
}

std::vector<std::string> global_roots(const SceneTree& tree) {
    std::set<std::string> roots;
    for (const auto& [id, node] : tree.parent)
        if (node.kind == ParentKind::Ground || node.kind == ParentKind::GroundWall)
            roots.insert(id);
    for (const LocalGroup& g : local_groups(tree)) {
        if (tree.wall_or_ceiling_rooted(g.root_id)) continue;
        roots.insert(g.root_id);
    }
    return {roots.begin(), roots.end()};
}

} // namespace stablescene
