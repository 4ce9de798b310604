#pragma once

#include "vlad/pcmath/point_cloud.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vlad::pcmath {

// Above this many reference points queries go through the k-d tree.
inline constexpr std::size_t kIndexThreshold = 256;

// Squared Euclidean distance, evaluated in a fixed order so every search path
// (exhaustive or indexed) produces the same bits for the same pair.
inline double squared_distance(const Point& a, const Point& b) {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
}

struct Neighbor {
    std::size_t index = 0;
    double squared_distance = 0.0;
};

/// Exact nearest-neighbor search over a fixed reference set.
///
/// Small sets are scanned exhaustively; larger ones use a k-d tree. Both paths
/// return the minimal squared distance exactly; on distance ties the lowest
/// reference index wins.
class NearestNeighborIndex {
public:
    explicit NearestNeighborIndex(std::span<const Point> reference);

    Neighbor nearest(const Point& query) const;
    std::size_t size() const noexcept { return reference_.size(); }
    bool indexed() const noexcept { return !nodes_.empty(); }

private:
    struct Node {
        // Leaf when axis < 0; then [begin, end) indexes order_.
        int axis = -1;
        double split = 0.0;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, const Point& query, Neighbor& best) const;

    std::vector<Point> reference_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace vlad::pcmath
