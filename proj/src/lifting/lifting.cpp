#include "vlad/lifting/lifting.hpp"

#include "vlad/error.hpp"

#include <cmath>
#include <limits>

namespace vlad::lifting {

LiftResult backproject_with_stats(const DepthMap& depth, const BinaryMask& mask, const CameraIntrinsics& k,
                                  pcmath::Frame frame, pcmath::Role role) {
    k.validate();
    if (depth.width() != mask.width() || depth.height() != mask.height()) {
        throw Error(ErrorCode::DimensionMismatch, "depth and mask dimensions differ");
    }
    LiftResult result;
    result.cloud.frame = frame;
    result.cloud.role = role;
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            if (!mask.at(u, v)) {
                continue;
            }
            ++result.stats.masked_pixels;
            if (!depth.valid(u, v)) {
                ++result.stats.invalid_depth;
                continue;
            }
            const double d = depth.at(u, v);
            result.cloud.points.emplace_back((u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d);
        }
    }
    result.stats.lifted = result.cloud.size();
    if (result.cloud.empty()) {
        throw Error(ErrorCode::EmptyLift, "no masked pixel has valid depth");
    }
    return result;
}

pcmath::PointCloud backproject(const DepthMap& depth, const BinaryMask& mask, const CameraIntrinsics& k,
                               pcmath::Frame frame, pcmath::Role role) {
    return backproject_with_stats(depth, mask, k, frame, role).cloud;
}

bool project_point(const pcmath::Point& p, const CameraIntrinsics& k, PixelCoord& out) {
    if (!(p.z() > 0.0)) {
        return false;
    }
    const double u = std::round(k.fx * p.x() / p.z() + k.cx);
    const double v = std::round(k.fy * p.y() / p.z() + k.cy);
    constexpr double lim = static_cast<double>(std::numeric_limits<int>::max() / 2);
    if (!std::isfinite(u) || !std::isfinite(v) || std::abs(u) > lim || std::abs(v) > lim) {
        return false;
    }
    out = {static_cast<int>(u), static_cast<int>(v)};
    return true;
}

BinaryMask project_to_mask(const pcmath::PointCloud& cloud, const CameraIntrinsics& k, int width, int height,
                           int dilation) {
    k.validate();
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "projecting an empty cloud");
    }
    BinaryMask mask(width, height);
    std::size_t hits = 0;
    for (const auto& p : cloud.points) {
        PixelCoord px;
        if (project_point(p, k, px) && mask.in_bounds(px.u, px.v)) {
            mask.set(px.u, px.v);
            ++hits;
        }
    }
    if (hits == 0) {
        throw Error(ErrorCode::EmptyProjection, "no point projects into the image");
    }
    return mask.dilate(dilation);
}

}  // namespace vlad::lifting
