#include "vlad/pcmath/nearest.hpp"

#include "vlad/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace vlad::pcmath {

namespace {

constexpr std::uint32_t kLeafSize = 8;

void consider(const Point& candidate, std::size_t index, const Point& query, Neighbor& best) {
    const double d = squared_distance(query, candidate);
    if (d < best.squared_distance || (d == best.squared_distance && index < best.index)) {
        best = {index, d};
    }
}

}  // namespace

NearestNeighborIndex::NearestNeighborIndex(std::span<const Point> reference)
    : reference_(reference.begin(), reference.end()) {
    if (reference_.empty()) {
        throw Error(ErrorCode::EmptyCloud, "nearest-neighbor index over an empty cloud");
    }
    if (reference_.size() > kIndexThreshold) {
        order_.resize(reference_.size());
        std::iota(order_.begin(), order_.end(), 0U);
        nodes_.reserve(2 * reference_.size() / kLeafSize + 1);
        build(0, static_cast<std::uint32_t>(order_.size()));
    }
}

std::int32_t NearestNeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{-1, 0.0, begin, end, -1, -1});
    if (end - begin <= kLeafSize) {
        return id;
    }

    Point lo = reference_[order_[begin]];
    Point hi = lo;
    for (std::uint32_t i = begin; i < end; ++i) {
        lo = lo.cwiseMin(reference_[order_[i]]);
        hi = hi.cwiseMax(reference_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis]) {
        // All points coincide; keep as one leaf.
        return id;
    }

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return reference_[a][axis] < reference_[b][axis]; });
    const double split = reference_[order_[mid]][axis];

    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
}

void NearestNeighborIndex::search(std::int32_t id, const Point& query, Neighbor& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.axis < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            consider(reference_[order_[i]], order_[i], query, best);
        }
        return;
    }
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double diff = query[node.axis] - node.split;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    search(near, query, best);
    // <= keeps equal-distance candidates reachable for the index tie-break.
    if (diff * diff <= best.squared_distance) {
        search(far, query, best);
    }
}

Neighbor NearestNeighborIndex::nearest(const Point& query) const {
    Neighbor best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
    if (nodes_.empty()) {
        for (std::size_t i = 0; i < reference_.size(); ++i) {
            consider(reference_[i], i, query, best);
        }
        return best;
    }
    search(0, query, best);
    return best;
}

}  // namespace vlad::pcmath
