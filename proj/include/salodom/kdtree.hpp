#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "salodom/geometry.hpp"

namespace salodom {

/// Static 3-D kd-tree over a borrowed point array. The points must outlive the
/// tree and stay unmodified.
class KdTree {
public:
    struct Neighbor {
        std::size_t index = std::numeric_limits<std::size_t>::max();
        double squared_distance = std::numeric_limits<double>::infinity();

        bool found() const { return index != std::numeric_limits<std::size_t>::max(); }
    };

    explicit KdTree(std::span<const Vec3> points);

    /// Exact nearest neighbor. Ties go to the smallest point index.
    Neighbor nearest(const Vec3& query) const;

    std::size_t size() const { return points_.size(); }

private:
    struct Node {
        std::uint32_t begin;
        std::uint32_t end;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int axis = -1;
        double split = 0.0;
    };

    static constexpr std::uint32_t kLeafSize = 12;

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, const Vec3& query, Neighbor& best) const;

    std::span<const Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace salodom
