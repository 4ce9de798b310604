#include "vlad/pcmath/metrics.hpp"

#include "vlad/error.hpp"

#include <algorithm>
#include <cmath>

namespace vlad::pcmath {

double mean_squared_nearest(std::span<const Point> from, const NearestNeighborIndex& to) {
    if (from.empty()) {
        throw Error(ErrorCode::EmptyCloud, "nearest-distance mean over an empty cloud");
    }
    double sum = 0.0;
    for (const auto& p : from) {
        sum += to.nearest(p).squared_distance;
    }
    return sum / static_cast<double>(from.size());
}

double chamfer(const PointCloud& a, const PointCloud& b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptyCloud, "chamfer distance needs two nonempty clouds");
    }
    const NearestNeighborIndex index_a(a.points);
    const NearestNeighborIndex index_b(b.points);
    return mean_squared_nearest(a.points, index_b) + mean_squared_nearest(b.points, index_a);
}

double hausdorff_unidirectional(const PointCloud& a, const PointCloud& b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptyCloud, "hausdorff distance needs two nonempty clouds");
    }
    const NearestNeighborIndex index_b(b.points);
    double worst = 0.0;
    for (const auto& p : a.points) {
        worst = std::max(worst, index_b.nearest(p).squared_distance);
    }
    return std::sqrt(worst);
}

ChamferTarget::ChamferTarget(std::span<const Point> target)
    : target_(target.begin(), target.end()), index_(target_) {}

double ChamferTarget::chamfer(std::span<const Point> moving) const {
    if (moving.empty()) {
        throw Error(ErrorCode::EmptyCloud, "chamfer distance needs two nonempty clouds");
    }
    const NearestNeighborIndex moving_index(moving);
    return mean_squared_nearest(target_, moving_index) + mean_squared_nearest(moving, index_);
}

double ChamferTarget::hausdorff_from(std::span<const Point> moving) const {
    if (moving.empty()) {
        throw Error(ErrorCode::EmptyCloud, "hausdorff distance needs a nonempty cloud");
    }
    double worst = 0.0;
    for (const auto& p : moving) {
        worst = std::max(worst, index_.nearest(p).squared_distance);
    }
    return std::sqrt(worst);
}

}  // namespace vlad::pcmath
