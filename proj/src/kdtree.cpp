#include "salodom/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "salodom/error.hpp"

namespace salodom {

KdTree::KdTree(std::span<const Vec3> points) : points_(points) {
    if (points.size() >= std::numeric_limits<std::uint32_t>::max()) {
        fail(ErrorCode::InvalidArgument, "kd-tree: too many points");
    }
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!points.empty()) {
        nodes_.reserve(2 * points.size() / kLeafSize + 1);
        build(0, static_cast<std::uint32_t>(points.size()));
    }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = points_[order_[begin]];
    Vec3 hi = lo;
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis;
    const double extent = (hi - lo).maxCoeff(&axis);
    if (extent <= 0.0) return id;  // all duplicates: keep as a leaf

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double pa = points_[a][axis];
                         const double pb = points_[b][axis];
                         return pa < pb || (pa == pb && a < b);
                     });
    const double split = points_[order_[mid]][axis];

    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
}

KdTree::Neighbor KdTree::nearest(const Vec3& query) const {
    Neighbor best;
    if (!nodes_.empty()) search(0, query, best);
    return best;
}

void KdTree::search(std::int32_t id, const Vec3& query, Neighbor& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.axis < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::uint32_t idx = order_[i];
            const double d2 = (points_[idx] - query).squaredNorm();
            if (d2 < best.squared_distance || (d2 == best.squared_distance && idx < best.index)) {
                best.squared_distance = d2;
                best.index = idx;
            }
        }
        return;
    }
    const double diff = query[node.axis] - node.split;
    const std::int32_t near_child = diff < 0.0 ? node.left : node.right;
    const std::int32_t far_child = diff < 0.0 ? node.right : node.left;
    search(near_child, query, best);
    // <= so that equal-distance points with a smaller index are still visited.
    if (diff * diff <= best.squared_distance) search(far_child, query, best);
}

}  // namespace salodom
