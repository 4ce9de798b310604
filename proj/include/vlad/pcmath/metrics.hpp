#pragma once

#include "vlad/pcmath/nearest.hpp"
#include "vlad/pcmath/point_cloud.hpp"

#include <span>

namespace vlad::pcmath {

// Mean over `from` of the squared distance to the nearest point of `to`.
double mean_squared_nearest(std::span<const Point> from, const NearestNeighborIndex& to);

/// Symmetric Chamfer distance, squared-distance convention:
/// mean_a min_b |a-b|^2 + mean_b min_a |a-b|^2.
double chamfer(const PointCloud& a, const PointCloud& b);

// Max over `a` of the Euclidean distance to the nearest point of `b`.
double hausdorff_unidirectional(const PointCloud& a, const PointCloud& b);

/// Chamfer against a fixed reference cloud with its index built once.
///
/// The alignment search scores many transformed copies of one cloud against
/// the same target; this keeps the target-side index alive between calls.
class ChamferTarget {
public:
    explicit ChamferTarget(std::span<const Point> target);

    double chamfer(std::span<const Point> moving) const;
    double hausdorff_from(std::span<const Point> moving) const;
    const NearestNeighborIndex& index() const noexcept { return index_; }
    std::span<const Point> points() const noexcept { return target_; }

private:
    std::vector<Point> target_;
    NearestNeighborIndex index_;
};

}  // namespace vlad::pcmath
