#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "stablescene/vec3.hpp"

namespace stablescene {

/// Static 3D kd-tree for nearest-neighbor queries (median split, max-spread
/// axis). Built once, queried concurrently (read-only).
class KdTree3 {
public:
    explicit KdTree3(const std::vector<Vec3>& points) : points_(points) {
        index_.resize(points.size());
        std::iota(index_.begin(), index_.end(), 0);
        nodes_.reserve(points.size() * 2);
        if (!points.empty()) root_ = build(0, points.size());
    }

    struct Hit {
        size_t index = size_t(-1);
        double dist2 = std::numeric_limits<double>::infinity();
    };

    Hit nearest(const Vec3& query) const {
        Hit hit;
        if (root_ >= 0) search(root_, query, hit);
        return hit;
    }

    size_t size() const { return points_.size(); }

private:
    struct Node {
        int left = -1, right = -1;
        size_t begin = 0, end = 0; // leaf range into index_
        int axis = 0;
        double split = 0.0;
        bool leaf = false;
    };

    static constexpr size_t kLeafSize = 16;

    int build(size_t begin, size_t end) {
        Node node;
        if (end - begin <= kLeafSize) {
            node.leaf = true;
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return int(nodes_.size()) - 1;
        }
        Vec3 lo = points_[index_[begin]], hi = lo;
        for (size_t i = begin; i < end; ++i) {
            lo = cwise_min(lo, points_[index_[i]]);
            hi = cwise_max(hi, points_[index_[i]]);
        }
        const Vec3 spread = hi - lo;
        int axis = 0;
        if (spread.y > spread[axis]) axis = 1;
        if (spread.z > spread[axis]) axis = 2;

        const size_t mid = (begin + end) / 2;
        std::nth_element(index_.begin() + long(begin), index_.begin() + long(mid),
                         index_.begin() + long(end), [&](size_t a, size_t b) {
                             return points_[a][axis] < points_[b][axis];
                         });
        node.axis = axis;
        node.split = points_[index_[mid]][axis];
        const int self = int(nodes_.size());
        nodes_.push_back(node);
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[size_t(self)].left = left;
        nodes_[size_t(self)].right = right;
        return self;
    }

    void search(int ni, const Vec3& q, Hit& hit) const {
        const Node& node = nodes_[size_t(ni)];
        if (node.leaf) {
            for (size_t i = node.begin; i < node.end; ++i) {
                const double d2 = norm2(points_[index_[i]] - q);
                if (d2 < hit.dist2) {
                    hit.dist2 = d2;
                    hit.index = index_[i];
                }
            }
            return;
        }
        const double delta = q[node.axis] - node.split;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        search(near, q, hit);
        if (delta * delta < hit.dist2) search(far, q, hit);
    }

    const std::vector<Vec3>& points_;
    std::vector<size_t> index_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace stablescene
