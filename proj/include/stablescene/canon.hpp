#pragma once

#include "stablescene/scene.hpp"

namespace stablescene {

struct UpEstimate {
    Vec3 direction{0, 1, 0}; // unit
    double confidence = 0.0; // fraction of anchors within 15 deg of consensus
};

/// Dominant up direction from ground-supported anchors: volume-weighted
/// average of each anchor's rotated body +Y axis. Throws StageError when the
/// scene has no ground-supported object.
UpEstimate estimate_up(const Scene& scene, const Layout& raw_layout);

/// Rigidly rotate the whole layout so the estimated up maps onto world +Y.
/// Pairwise relative poses are preserved exactly.
Layout reorient_scene(const Layout& raw_layout, const UpEstimate& up);

/// Pre-order support snapping: each On/Inside child is translated along Y
/// so its lowest point rests on the parent's support surface under the
/// child's footprint; ground children rest at Y=0. Only Y changes;
/// Hanging/Attached children are untouched.
Layout snap_supports(const Scene& scene, const SceneTree& tree, const Layout& layout);

/// estimate_up + reorient_scene + snap_supports.
Layout canonicalize(const Scene& scene, const Layout& raw_layout);

/// Max Y of the posed hulls' surface restricted to the XZ rectangle
/// [x0,x1]x[z0,z1]; returns -inf when no geometry overlaps the rectangle.
/// Exposed for the canon test oracles.
double support_height_in_footprint(const std::vector<ConvexHull>& hulls, const Pose& pose,
                                   double x0, double x1, double z0, double z1);

} // namespace stablescene
